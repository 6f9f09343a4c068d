#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhc/linsolve.hpp"
#include "hhc/operators.hpp"

namespace hhc {

using SpaceTimeFn = std::function<double(double, double, double)>;

// Problem data: coefficients, initial data (temperature rate and/or initial
// flux), volumetric source, horizon, and optional exact solution fields.
struct Problem {
  std::string name;
  SpaceFn c_fn;
  SpaceFn k_fn;
  double nu = 1.0;
  bool parabolic_limit = false;

  SpaceFn v0;
  SpaceFn v1;          // initial temperature rate (three-level formulation)
  SpaceFn g0_1, g0_2;  // initial heat flux (system formulation)

  SpaceTimeFn f;      // volumetric source; empty means zero
  SpaceTimeFn df_dt;  // time derivative of f; empty means zero

  double T = 1.0;

  SpaceTimeFn u_exact;
  SpaceTimeFn q1_exact, q2_exact;

  bool has_v1() const { return bool(v1); }
  bool has_g0() const { return bool(g0_1) && bool(g0_2); }
};

void validate_problem(const Problem& p);
Coefficients problem_coefficients(const Problem& p, const StaggeredGrid& g);

enum class SchemeKind {
  ThreeLevelWeighted,
  ThreeLevelExplicit,
  LodQ,
  LodC,
  RegularizedEquiv,  // three-level form of the regularized staggered scheme
  SystemWeighted,
  StaggeredExplicit,
  StaggeredWeightedFlux,
  StaggeredRegularized,
  StaggeredAdditiveQ,
  StaggeredFluxPerturbed,
  SplitComponentwiseP2,
  SplitComponentwiseP3,
};

enum class SchemeFamily { ThreeLevel, System, Staggered, Componentwise };

SchemeFamily family_of(SchemeKind kind);
std::string to_string(SchemeKind kind);
std::optional<SchemeKind> parse_scheme_kind(const std::string& name);
// The kinds exposed through the CLI (RegularizedEquiv is library-internal).
const std::vector<SchemeKind>& public_scheme_kinds();

enum class SourceSplit { FirstSubstep, Even };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::ThreeLevelWeighted;
  double sigma = 0.5;
  double tau = 0.0;
  int p = 3;  // implied by the componentwise kind
  bool second_order_start = true;
  bool override_stability = false;
  // Use conductivity-weighted factors in the reduced operator of the
  // system scheme and in the regularizer of the staggered implicit scheme
  // (default keeps the unit-conductivity form).
  bool k_in_reduced_operator = false;
  // Distribution of the half-level source over the splitting substeps.
  // The even distribution keeps the symmetric cycle second order; loading
  // the first substep costs one order in time.
  SourceSplit source_split = SourceSplit::Even;
  double solver_tol = 1e-10;
  int solver_max_iter = 0;  // 0 => 10 * unknowns
};

struct StabilityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest stable step of the explicit schemes,
// tau_max = sqrt(4 nu c0 / (k1 (Delta1 + Delta2))). Throws for nu == 0.
double explicit_stability_limit(const StaggeredGrid& g, const Coefficients& coef);

// Messages for every violated stability precondition of the configured
// scheme; empty when all sanctioned conditions hold. Violations are
// warnings, not errors; only the explicit kinds refuse to step past their
// limit without the override flag.
std::vector<std::string> stability_prechecks(const SchemeConfig& cfg, const StaggeredGrid& g,
                                             const Coefficients& coef, double T);

// Source samples. phi_integer is the integer-level source of the weighted
// and explicit schemes, f^n + nu*(f^{n+1}-f^{n-1})/(2 tau); phi_half is the
// half-level combination (f^{n+1/2}+f^{n-1/2})/2 + nu*(f^{n+1/2}-f^{n-1/2})/tau
// used by the staggered-derived kinds.
ScalarField sample_source(const Problem& p, const StaggeredGrid& g, double t);
ScalarField source_integer_phi(const Problem& p, const StaggeredGrid& g, double t, double tau);
ScalarField source_half_phi(const Problem& p, const StaggeredGrid& g, double t, double tau);
// The phi the given kind assembles at step n (used by monitors and
// equivalence residuals).
ScalarField scheme_phi(SchemeKind kind, const Problem& p, const StaggeredGrid& g, double t,
                       double tau);

struct ThreeLevelState {
  ScalarField u_prev;  // level n-1
  ScalarField u_curr;  // level n
  int n = 0;
  double t = 0.0;
};

struct StaggeredState {
  ScalarField u_prev;  // level n-1
  ScalarField u;       // level n
  FluxField q1, q2;    // level n-1/2
  int n = 0;
  double t = 0.0;
};

struct VectorState {
  FluxField q1, q2;
  ScalarField u;
  int n = 0;
  double t = 0.0;
};

// Start for the three-level kinds: u^0 = v0 and u^1 = u^0 + tau*w0 with
// w0 = v1 + (tau/2)*u_tt(0) (second order) or w0 = v1 (first order). When
// v1 is absent it is recovered from the initial flux through the divergence
// equation.
ThreeLevelState start_threelevel(const Problem& p, const StaggeredGrid& g,
                                 const Coefficients& coef, const SchemeConfig& cfg);

ThreeLevelState step_threelevel(const ThreeLevelState& s, const SchemeConfig& cfg,
                                const Problem& p, const Coefficients& coef,
                                SolveStats* stats = nullptr);

// Integer-level initial data u^0 = v0, q^0 = g0 for the system and
// componentwise kinds. A missing g0 falls back to the relaxed flux -k grad v0.
VectorState init_vector(const Problem& p, const StaggeredGrid& g, const Coefficients& coef);

VectorState step_system_weighted(const VectorState& s, const SchemeConfig& cfg,
                                 const Problem& p, const Coefficients& coef,
                                 SolveStats* stats = nullptr);

// Staggered start: q^{1/2} = g0 + (tau/2)*dq/dt(0) with
// dq/dt(0) = -(g0 + k grad v0)/nu (first-order option keeps q^{1/2} = g0),
// then u^1 from the explicit temperature update, so the returned state is
// (u^1, q^{1/2}) at n = 1.
StaggeredState init_staggered(const Problem& p, const StaggeredGrid& g,
                              const Coefficients& coef, const SchemeConfig& cfg);

StaggeredState step_staggered(const StaggeredState& s, const SchemeConfig& cfg,
                              const Problem& p, const Coefficients& coef,
                              SolveStats* stats = nullptr);

VectorState step_componentwise(const VectorState& s, const SchemeConfig& cfg,
                               const Problem& p, const Coefficients& coef,
                               SolveStats* stats = nullptr);

}  // namespace hhc

#pragma once

#include <optional>

#include "hhc/schemes.hpp"

namespace hhc {

// Quadratic stability functionals. The S kinds act on a pair of consecutive
// temperature levels through the difference rate eta = (u - u_prev)/tau and
// the average zeta = (u + u_prev)/2:
//   SWeighted: nu (c eta, eta) + (sigma - 1/4) tau^2 (D eta, eta) + (D zeta, zeta)
//   SExplicit: nu (c eta, eta) - (tau^2/4) (D eta, eta) + (D zeta, zeta)
//   SQ:        nu (M eta, eta) - (tau^2/4) (D eta, eta) + (D zeta, zeta),
//              M the scheme's regularized time operator c^{1/2} Q c^{1/2}
//              (factored) or c^{1/2} (E + s t^2 L) c^{1/2}
//   SC:        nu (c eta, eta) - (tau^2/4) (C eta, eta) + (C zeta, zeta)
// G acts on an integer-level vector state:
//   G: (c u, u) + nu sum_a (k^{-1} q_a, q_a)_a
enum class EnergyKind { SWeighted, SExplicit, SQ, SC, G };

std::string to_string(EnergyKind kind);
EnergyKind default_energy(SchemeKind kind);

double energy_pair(EnergyKind kind, const ScalarField& u, const ScalarField& u_prev,
                   const SchemeConfig& cfg, const Coefficients& coef);
double energy_vector(const ScalarField& u, const FluxField& q1, const FluxField& q2,
                     const Coefficients& coef);

struct EnergyRecord {
  int n = 0;
  double t = 0.0;
  double value = 0.0;
  double bound_rhs = 0.0;
  double slack = 0.0;
  bool violated = false;
};

struct RunOptions {
  bool monitor = true;
  bool record_levels = false;
  // > 0 runs exactly this many steps at the configured tau instead of
  // adjusting tau to land on T.
  int fixed_steps = 0;
};

struct RunResult {
  std::vector<EnergyRecord> energy;
  int violations = 0;
  std::vector<ScalarField> levels;  // u^0..u^N when recorded
  ScalarField u_final;
  std::optional<FluxField> q1_final, q2_final;
  double tau = 0.0;
  int steps = 0;
  SolveStats stats;
  double seconds = 0.0;
  EnergyKind energy_kind = EnergyKind::SWeighted;
};

// Steps the configured scheme from t = 0 to T (tau adjusted downward so the
// step count is integral), monitoring the per-step energy inequality.
RunResult run_scheme(const Problem& p, const GridSpec& gs, SchemeConfig cfg,
                     const RunOptions& opt = {});

// Residuals of the three-level identities satisfied by the staggered
// trajectories: the explicit staggered pair collapses onto the explicit
// three-level scheme, and the regularized pair onto its three-level form
// with the regularized time operator.
enum class EquivalenceKind { ExplicitThreeLevel, RegularizedThreeLevel };

double equivalence_residual(EquivalenceKind kind, const std::vector<ScalarField>& levels,
                            const Problem& p, const SchemeConfig& cfg,
                            const Coefficients& coef);

// Max relative temperature difference between the flux-perturbed staggered
// scheme and the split-C three-level scheme started from the same two levels.
double split_correspondence_max_diff(const Problem& p, const GridSpec& gs, double sigma,
                                     double tau, int steps);

// Manufactured problem catalog:
//   m1              separable mode, k = c = 1
//   m1-homogeneous  same initial data with f = 0 (no exact solution)
//   m2              variable conductivity k = 1 + 0.5 x1
//   m3              the m1 family reparameterized by nu (relaxation sweep)
struct ManufacturedParams {
  double nu = 1.0;
  double omega = 2.0;
  double T = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
};

Problem manufactured_problem(const std::string& id, const ManufacturedParams& prm = {});
const std::vector<std::string>& manufactured_ids();

// Single-mode problem at the top of the discrete spectrum (used by the
// stability scans): v0 is the highest grid mode, v1 = 0, f = 0.
Problem top_mode_problem(const GridSpec& gs, double nu, double T);

struct LadderRung {
  GridSpec grid;
  double tau = 0.0;
};

struct ConvergenceRow {
  double h1 = 0.0, h2 = 0.0, tau = 0.0;
  double err_max = 0.0, err_l2 = 0.0;
  double order_max = 0.0, order_l2 = 0.0;  // NaN when not computed
};

using ReferenceAtT = std::function<ScalarField(const StaggeredGrid&)>;

// Errors at the final time in the max and h-weighted norms, with observed
// orders between consecutive rungs of a factor-2 ladder. The reference
// defaults to the problem's exact solution sampled at T.
std::vector<ConvergenceRow> convergence_study(const Problem& p, const SchemeConfig& cfg,
                                              const std::vector<LadderRung>& ladder,
                                              const ReferenceAtT* reference = nullptr);

// Per-step amplitude growth factor of a recorded trajectory.
double growth_factor(const std::vector<ScalarField>& levels);

}  // namespace hhc

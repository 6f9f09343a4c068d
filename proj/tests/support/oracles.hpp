#pragma once

#include <random>
#include <vector>

#include "hhc/dense.hpp"
#include "hhc/diagnostics.hpp"
#include "hhc/reference.hpp"

// Brute-force ground truth for the scheme tests: dense assemblies of every
// grid operator (built from the serial reference kernels), dense one-step
// updates of each scheme solved by LU, and the scalar recurrence a single
// mode satisfies. Intended for grids of at most ~100 unknowns.
namespace oracle {

using hhc::Coefficients;
using hhc::FluxField;
using hhc::Problem;
using hhc::ScalarField;
using hhc::SchemeConfig;
using hhc::SchemeKind;
using hhc::StaggeredGrid;
using hhc::dense::Matrix;

ScalarField random_scalar(const StaggeredGrid& g, std::mt19937& rng, double lo = -1.0,
                          double hi = 1.0);
FluxField random_flux(const StaggeredGrid& g, int alpha, std::mt19937& rng, double lo = -1.0,
                      double hi = 1.0);

struct Ops {
  StaggeredGrid g;
  int ns = 0, nf1 = 0, nf2 = 0;
  Matrix A1, A2;    // gradient components, scalar -> flux
  Matrix A1t, A2t;  // their adjoints, flux -> scalar
  Matrix K1, K2;    // diag conductivity on the flux spaces
  Matrix C, Csqrt, Cinvsqrt;
  Matrix D;  // A1t K1 A1 + A2t K2 A2
  Matrix L;  // unit-conductivity counterpart
};

Ops make_ops(const StaggeredGrid& g, const Coefficients& coef);

Matrix q_factored_dense(const Ops& ops, double sigma, double tau);
Matrix c_split_dense(const Ops& ops, const Coefficients& coef, double sigma, double tau);
Matrix regularizer_dense(const Ops& ops, double sigma, double tau, bool with_k);

// One dense step of any scheme kind. Temperature-only kinds use (u_prev, u);
// the staggered kinds additionally take (q1, q2) at the half level below u;
// the vector kinds take integer-level (q1, q2, u).
struct DenseState {
  std::vector<double> u_prev, u;
  std::vector<double> q1, q2;
};

DenseState dense_step(SchemeKind kind, const Ops& ops, const Coefficients& coef,
                      const SchemeConfig& cfg, const Problem& p, double t,
                      const DenseState& s);

// Direct block solve of the coupled system-scheme equations at the new level
// (conductivity retained in the elimination), for cross-checking the reduced
// path.
DenseState dense_system_block_step(const Ops& ops, const Coefficients& coef,
                                   const SchemeConfig& cfg, const Problem& p, double t,
                                   const DenseState& s);

// Amplitude recurrence of one diffusion eigenmode under the weighted
// three-level scheme with k = c = 1:
//   nu (a^{n+1}-2a^n+a^{n-1})/tau^2 + (a^{n+1}-a^{n-1})/(2 tau)
//     + lambda (sigma a^{n+1} + (1-2 sigma) a^n + sigma a^{n-1}) = phi^n.
std::vector<double> mode_recurrence(double nu, double lambda, double sigma, double tau,
                                    double a0, double a1, int steps,
                                    const std::vector<double>& phi = {});

// Largest characteristic-root magnitude of that recurrence.
double mode_max_root(double nu, double lambda, double sigma, double tau);

}  // namespace oracle

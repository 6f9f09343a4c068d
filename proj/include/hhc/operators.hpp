#pragma once

#include "hhc/grid.hpp"

namespace hhc {

// Material data on the staggered grid: heat capacity at temperature nodes,
// conductivity evaluated directly at the flux midpoints of each direction,
// flux relaxation time nu, and the scalar bounds used by stability limits.
struct Coefficients {
  ScalarField c;
  FluxField k1;
  FluxField k2;
  ScalarField c_sqrt;      // cached sqrt(c)
  ScalarField c_inv_sqrt;  // cached 1/sqrt(c)
  double nu = 0.0;
  double c0 = 0.0;      // min over nodes of c
  double k0 = 0.0;      // min over face midpoints of k
  double k1_max = 0.0;  // max over face midpoints of k
  bool parabolic_limit = false;  // permits nu == 0

  const FluxField& k(int alpha) const { return alpha == 1 ? k1 : k2; }
};

// Samples c and k on the grid and derives the bounds. Throws if any sampled
// value is non-positive, or if nu <= 0 without the parabolic-limit flag.
Coefficients make_coefficients(const StaggeredGrid& g, const SpaceFn& c_fn,
                               const SpaceFn& k_fn, double nu,
                               bool parabolic_limit = false);

// Extreme eigenvalues of the unit-conductivity one-dimensional second
// difference with zero Dirichlet ends:
//   delta_a = (4/h_a^2) sin^2(pi h_a / (2 l_a))
//   Delta_a = (4/h_a^2) cos^2(pi h_a / (2 l_a))
struct SpectralBounds {
  double delta1 = 0.0, delta2 = 0.0;
  double Delta1 = 0.0, Delta2 = 0.0;

  double delta(int alpha) const { return alpha == 1 ? delta1 : delta2; }
  double Delta(int alpha) const { return alpha == 1 ? Delta1 : Delta2; }
};

SpectralBounds spectral_bounds(const StaggeredGrid& g);

// Forward midpoint difference of a temperature field in direction alpha;
// boundary temperature values are taken as zero. Maps H -> H_alpha.
FluxField apply_grad(int alpha, const ScalarField& u);

// Adjoint of apply_grad (negative divergence-style difference at interior
// temperature nodes): (grad y, w)_alpha == (y, grad_adjoint w) exactly in
// real arithmetic. Maps H_alpha -> H.
ScalarField apply_grad_adjoint(const FluxField& q);

// Conservative second difference with face conductivities,
// grad_adjoint(k ⊙ grad u) in direction alpha, and the full sum over both
// directions. Self-adjoint and positive definite on H.
ScalarField apply_diffusion_dir(int alpha, const ScalarField& u, const Coefficients& coef);
ScalarField apply_diffusion(const ScalarField& u, const Coefficients& coef);

// Three-factor direction product with unit conductivity inside the factors:
//   Q = (E + (s/2) t^2 L2) (E + s t^2 L1) (E + (s/2) t^2 L2),
// where L_a = grad_adjoint_a grad_a. Symmetric, Q >= E; dominates
// E + s t^2 (L1 + L2). solve_q_factored inverts it by three batched
// tridiagonal line solves (factors inverted left to right).
ScalarField apply_q_factored(const ScalarField& u, double sigma, double tau);
ScalarField solve_q_factored(const ScalarField& rhs, double sigma, double tau);

// Direction-split substitute for the diffusion operator:
//   C = sum_a grad_adjoint_a (k^{-1} E + s t^2 grad_a grad_adjoint_a)^{-1} grad_a
// with k at flux midpoints; each inner inverse is a batched line solve on
// the direction-a flux grid. Symmetric, 0 < C_a < (1/(s t^2)) E.
ScalarField apply_c_split(const ScalarField& u, const Coefficients& coef, double sigma,
                          double tau);

// Regularizing shift E + s t^2 * sum_a grad_adjoint_a (w grad_a), with unit
// face weights by default or the face conductivities when with_k is set.
ScalarField apply_regularizer(const ScalarField& u, const Coefficients& coef, double sigma,
                              double tau, bool with_k);

}  // namespace hhc

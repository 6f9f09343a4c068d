#pragma once

#include "hhc/linsolve.hpp"
#include "hhc/operators.hpp"

// Plain serial implementations of the hot kernels, kept as the ground truth
// the parallel versions are tested and benchmarked against. The difference
// operators here are built by composing the primitive stencils (gradient,
// conductivity scaling, adjoint) rather than the fused loops used by the
// main kernels, so the two paths are independent routes to the same result.
namespace hhc::ref {

FluxField apply_grad(int alpha, const ScalarField& u);
ScalarField apply_grad_adjoint(const FluxField& q);
ScalarField apply_diffusion_dir(int alpha, const ScalarField& u, const Coefficients& coef);
ScalarField apply_diffusion(const ScalarField& u, const Coefficients& coef);

double inner_h(const ScalarField& y, const ScalarField& w);
double inner_h_alpha(const FluxField& y, const FluxField& w);

ScalarField solve_lines(const LineSystem& sys, const ScalarField& rhs);
FluxField solve_lines(const LineSystem& sys, const FluxField& rhs);

}  // namespace hhc::ref

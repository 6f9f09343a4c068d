#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "hhc/grid.hpp"

namespace hhc {

// Counters surfaced to the CLI cost reports.
struct SolveStats {
  long cg_iterations = 0;
  long cg_solves = 0;
  long line_sweeps = 0;  // batched tridiagonal sweeps (one per factor application)

  void operator+=(const SolveStats& o) {
    cg_iterations += o.cg_iterations;
    cg_solves += o.cg_solves;
    line_sweeps += o.line_sweeps;
  }
};

struct SolveFailure : std::runtime_error {
  SolveFailure(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

// One-dimensional implicit factor along direction `alpha`.
//
// On a temperature field the operator is  diag + b * grad_adjoint_a (w ⊙ grad_a x)
// (zero Dirichlet line ends); on a flux field it is  diag + b * grad_a grad_adjoint_a x
// (natural line ends). The diagonal is either the uniform constant `a` or the
// nodal array `diag`; `weight` (temperature form only) holds per-face
// conductivities over the direction-a flux index set. With diag > 0 and
// b >= 0 every line system is symmetric positive definite and diagonally
// dominant, so unpivoted elimination is exact up to round-off.
struct LineSystem {
  int alpha = 1;
  double a = 1.0;
  const std::vector<double>* diag = nullptr;
  double b = 0.0;
  const std::vector<double>* weight = nullptr;
};

ScalarField solve_lines(const LineSystem& sys, const ScalarField& rhs,
                        SolveStats* stats = nullptr);
FluxField solve_lines(const LineSystem& sys, const FluxField& rhs,
                      SolveStats* stats = nullptr);

// Forward application of the same operator (used by tests and residual checks).
ScalarField apply_lines(const LineSystem& sys, const ScalarField& x);
FluxField apply_lines(const LineSystem& sys, const FluxField& x);

// Conjugate gradients for symmetric positive definite operators on H.
// Stops at relative residual <= tol (in the h-weighted norm); throws
// SolveFailure carrying the final residual if max_iter is exhausted.
// max_iter <= 0 selects 10 * (number of unknowns).
struct SpdOptions {
  double tol = 1e-10;
  int max_iter = 0;
};

using ScalarOp = std::function<ScalarField(const ScalarField&)>;

ScalarField solve_spd(const ScalarOp& apply, const ScalarField& rhs,
                      const SpdOptions& opt = {}, SolveStats* stats = nullptr);

}  // namespace hhc

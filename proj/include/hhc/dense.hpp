#pragma once

#include <functional>
#include <vector>

#include "hhc/grid.hpp"

// Dense assemblies of the grid operators for brute-force checks on small
// grids (intended for <= 100 unknowns), plus the plain direct solvers the
// oracles need: unblocked LU with partial pivoting and cyclic Jacobi
// rotations for symmetric eigenvalues.
namespace hhc::dense {

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }
};

Matrix identity(int n);
Matrix multiply(const Matrix& A, const Matrix& B);
Matrix add_scaled(const Matrix& A, double s, const Matrix& B);  // A + s*B
Matrix transpose(const Matrix& A);
std::vector<double> multiply(const Matrix& A, const std::vector<double>& x);
bool is_symmetric(const Matrix& A, double tol);

// Column-by-column assembly from an operator on flat coefficient vectors.
using VecOp = std::function<std::vector<double>(const std::vector<double>&)>;
Matrix from_operator(int dim_in, int dim_out, const VecOp& apply);

// Assembly helpers over grid fields.
Matrix assemble_scalar_op(const StaggeredGrid& g,
                          const std::function<ScalarField(const ScalarField&)>& op);
Matrix assemble_flux_op(const StaggeredGrid& g, int alpha,
                        const std::function<FluxField(const FluxField&)>& op);
// Rectangular assemblies of maps between the scalar and flux spaces.
Matrix assemble_scalar_to_flux(const StaggeredGrid& g, int alpha,
                               const std::function<FluxField(const ScalarField&)>& op);
Matrix assemble_flux_to_scalar(const StaggeredGrid& g, int alpha,
                               const std::function<ScalarField(const FluxField&)>& op);

std::vector<double> lu_solve(Matrix A, std::vector<double> b);
Matrix lu_inverse(const Matrix& A);

// All eigenvalues of a symmetric matrix, ascending.
std::vector<double> sym_eigenvalues(Matrix A);

}  // namespace hhc::dense

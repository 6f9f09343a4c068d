#include "hhc/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hhc::dense {

Matrix identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix multiply(const Matrix& A, const Matrix& B) {
  if (A.cols != B.rows) throw std::invalid_argument("dense::multiply: shape mismatch");
  Matrix C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

Matrix add_scaled(const Matrix& A, double s, const Matrix& B) {
  if (A.rows != B.rows || A.cols != B.cols)
    throw std::invalid_argument("dense::add_scaled: shape mismatch");
  Matrix C = A;
  for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] += s * B.a[i];
  return C;
}

Matrix transpose(const Matrix& A) {
  Matrix T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

std::vector<double> multiply(const Matrix& A, const std::vector<double>& x) {
  if (int(x.size()) != A.cols) throw std::invalid_argument("dense::multiply: vector size");
  std::vector<double> y(A.rows, 0.0);
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

bool is_symmetric(const Matrix& A, double tol) {
  if (A.rows != A.cols) return false;
  for (int i = 0; i < A.rows; ++i)
    for (int j = i + 1; j < A.cols; ++j)
      if (std::abs(A(i, j) - A(j, i)) > tol) return false;
  return true;
}

Matrix from_operator(int dim_in, int dim_out, const VecOp& apply) {
  Matrix M(dim_out, dim_in);
  std::vector<double> e(dim_in, 0.0);
  for (int j = 0; j < dim_in; ++j) {
    e[j] = 1.0;
    std::vector<double> col = apply(e);
    if (int(col.size()) != dim_out)
      throw std::invalid_argument("dense::from_operator: output size mismatch");
    for (int i = 0; i < dim_out; ++i) M(i, j) = col[i];
    e[j] = 0.0;
  }
  return M;
}

Matrix assemble_scalar_op(const StaggeredGrid& g,
                          const std::function<ScalarField(const ScalarField&)>& op) {
  const int n = int(g.scalar_size());
  return from_operator(n, n, [&](const std::vector<double>& v) {
    ScalarField f(g);
    f.values() = v;
    return op(f).values();
  });
}

Matrix assemble_flux_op(const StaggeredGrid& g, int alpha,
                        const std::function<FluxField(const FluxField&)>& op) {
  const int n = int(g.flux_size(alpha));
  return from_operator(n, n, [&](const std::vector<double>& v) {
    FluxField f(g, alpha);
    f.values() = v;
    return op(f).values();
  });
}

Matrix assemble_scalar_to_flux(const StaggeredGrid& g, int alpha,
                               const std::function<FluxField(const ScalarField&)>& op) {
  return from_operator(int(g.scalar_size()), int(g.flux_size(alpha)),
                       [&](const std::vector<double>& v) {
                         ScalarField f(g);
                         f.values() = v;
                         return op(f).values();
                       });
}

Matrix assemble_flux_to_scalar(const StaggeredGrid& g, int alpha,
                               const std::function<ScalarField(const FluxField&)>& op) {
  return from_operator(int(g.flux_size(alpha)), int(g.scalar_size()),
                       [&](const std::vector<double>& v) {
                         FluxField f(g, alpha);
                         f.values() = v;
                         return op(f).values();
                       });
}

std::vector<double> lu_solve(Matrix A, std::vector<double> b) {
  if (A.rows != A.cols || int(b.size()) != A.rows)
    throw std::invalid_argument("dense::lu_solve: shape mismatch");
  const int n = A.rows;
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;

  for (int k = 0; k < n; ++k) {
    int imax = k;
    double vmax = std::abs(A(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > vmax) {
        vmax = std::abs(A(i, k));
        imax = i;
      }
    if (vmax == 0.0) throw std::runtime_error("dense::lu_solve: singular matrix");
    if (imax != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(imax, j));
      std::swap(b[k], b[imax]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = A(i, k) / A(k, k);
      A(i, k) = 0.0;
      for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
      b[i] -= m * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
    b[i] = s / A(i, i);
  }
  return b;
}

Matrix lu_inverse(const Matrix& A) {
  const int n = A.rows;
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    std::vector<double> col = lu_solve(A, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

std::vector<double> sym_eigenvalues(Matrix A) {
  if (A.rows != A.cols) throw std::invalid_argument("sym_eigenvalues: not square");
  const int n = A.rows;
  // Cyclic Jacobi sweeps; terminates when the off-diagonal mass is negligible.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag += A(i, i) * A(i, i);
    if (off <= 1e-30 * std::max(1.0, diag)) break;

    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace hhc::dense

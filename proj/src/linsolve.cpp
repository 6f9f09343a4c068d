#include "hhc/linsolve.hpp"

#include <cmath>

namespace hhc {

namespace {

// Thomas elimination for one line. sub/diag/sup are the row coefficients,
// x holds the rhs on input and the solution on output. work is scratch of
// the same length.
inline void thomas(int n, const double* sub, const double* diag, const double* sup,
                   double* x, double* work) {
  work[0] = sup[0] / diag[0];
  x[0] = x[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = 1.0 / (diag[i] - sub[i] * work[i - 1]);
    work[i] = sup[i] * m;
    x[i] = (x[i] - sub[i] * x[i - 1]) * m;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= work[i] * x[i + 1];
}

struct LineView {
  double* base;
  std::size_t stride;
  double& operator[](int i) const { return base[stride * i]; }
};

}  // namespace

static void check_line_system(const LineSystem& sys, std::size_t field_size,
                              std::size_t weight_size) {
  if (sys.alpha != 1 && sys.alpha != 2)
    throw std::invalid_argument("solve_lines: direction must be 1 or 2");
  if (sys.diag) {
    if (sys.diag->size() != field_size)
      throw std::invalid_argument("solve_lines: diagonal array size mismatch");
    for (double d : *sys.diag)
      if (!(d > 0.0)) throw std::invalid_argument("solve_lines: diagonal must be positive");
  } else if (!(sys.a > 0.0)) {
    throw std::invalid_argument("solve_lines: uniform diagonal must be positive");
  }
  if (sys.b < 0.0) throw std::invalid_argument("solve_lines: b must be nonnegative");
  if (sys.weight && sys.weight->size() != weight_size)
    throw std::invalid_argument("solve_lines: face weight array size mismatch");
}

// Temperature lines: diag + b * grad_adjoint_a (w ⊙ grad_a x), Dirichlet ends.
ScalarField solve_lines(const LineSystem& sys, const ScalarField& rhs, SolveStats* stats) {
  const StaggeredGrid& g = rhs.grid();
  check_line_system(sys, rhs.size(), g.flux_size(sys.alpha));
  ScalarField x = rhs;
  const int n1 = x.n1(), n2 = x.n2();
  const int len = sys.alpha == 1 ? n1 : n2;
  const int batch = sys.alpha == 1 ? n2 : n1;
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);
  const auto* dv = sys.diag;
  const auto* wv = sys.weight;

#pragma omp parallel
  {
    std::vector<double> sub(len), diag(len), sup(len), work(len), xs(len);
#pragma omp for schedule(static)
    for (int line = 0; line < batch; ++line) {
      for (int i = 0; i < len; ++i) {
        const int j1 = sys.alpha == 1 ? i : line;
        const int j2 = sys.alpha == 1 ? line : i;
        const std::size_t fidx = std::size_t(j1) * n2 + j2;
        // Faces of node i along the line: lower face index i, upper face i+1
        // in the direction-a flux layout.
        double wl = 1.0, wu = 1.0;
        if (wv) {
          if (sys.alpha == 1) {
            wl = (*wv)[std::size_t(j1) * n2 + j2];
            wu = (*wv)[std::size_t(j1 + 1) * n2 + j2];
          } else {
            const std::size_t row = std::size_t(j1) * g.flux_n2(2);
            wl = (*wv)[row + j2];
            wu = (*wv)[row + j2 + 1];
          }
        }
        const double d0 = dv ? (*dv)[fidx] : sys.a;
        sub[i] = -bih2 * wl;
        sup[i] = -bih2 * wu;
        diag[i] = d0 + bih2 * (wl + wu);
        xs[i] = x.values()[fidx];
      }
      thomas(len, sub.data(), diag.data(), sup.data(), xs.data(), work.data());
      for (int i = 0; i < len; ++i) {
        const int j1 = sys.alpha == 1 ? i : line;
        const int j2 = sys.alpha == 1 ? line : i;
        x.values()[std::size_t(j1) * n2 + j2] = xs[i];
      }
    }
  }
  if (stats) ++stats->line_sweeps;
  return x;
}

// Flux lines: diag + b * grad_a grad_adjoint_a x, natural ends.
FluxField solve_lines(const LineSystem& sys, const FluxField& rhs, SolveStats* stats) {
  if (sys.weight)
    throw std::invalid_argument("solve_lines: face weights apply to temperature lines only");
  if (sys.alpha != rhs.alpha())
    throw std::invalid_argument("solve_lines: direction does not match the flux field");
  check_line_system(sys, rhs.size(), 0);
  const StaggeredGrid& g = rhs.grid();
  FluxField x = rhs;
  const int n1 = x.n1(), n2 = x.n2();
  const int len = sys.alpha == 1 ? n1 : n2;
  const int batch = sys.alpha == 1 ? n2 : n1;
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);
  const auto* dv = sys.diag;

#pragma omp parallel
  {
    std::vector<double> sub(len), diag(len), sup(len), work(len), xs(len);
#pragma omp for schedule(static)
    for (int line = 0; line < batch; ++line) {
      for (int i = 0; i < len; ++i) {
        const int j1 = sys.alpha == 1 ? i : line;
        const int j2 = sys.alpha == 1 ? line : i;
        const std::size_t fidx = std::size_t(j1) * n2 + j2;
        const double d0 = dv ? (*dv)[fidx] : sys.a;
        const double mult = (i == 0 || i == len - 1) ? 1.0 : 2.0;
        sub[i] = i > 0 ? -bih2 : 0.0;
        sup[i] = i < len - 1 ? -bih2 : 0.0;
        diag[i] = d0 + bih2 * mult;
        xs[i] = x.values()[fidx];
      }
      thomas(len, sub.data(), diag.data(), sup.data(), xs.data(), work.data());
      for (int i = 0; i < len; ++i) {
        const int j1 = sys.alpha == 1 ? i : line;
        const int j2 = sys.alpha == 1 ? line : i;
        x.values()[std::size_t(j1) * n2 + j2] = xs[i];
      }
    }
  }
  if (stats) ++stats->line_sweeps;
  return x;
}

ScalarField apply_lines(const LineSystem& sys, const ScalarField& u) {
  const StaggeredGrid& g = u.grid();
  check_line_system(sys, u.size(), g.flux_size(sys.alpha));
  ScalarField out(g);
  const int n1 = u.n1(), n2 = u.n2();
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);
  for (int j1 = 0; j1 < n1; ++j1)
    for (int j2 = 0; j2 < n2; ++j2) {
      const std::size_t fidx = std::size_t(j1) * n2 + j2;
      const double d0 = sys.diag ? (*sys.diag)[fidx] : sys.a;
      double wl = 1.0, wu = 1.0;
      if (sys.weight) {
        if (sys.alpha == 1) {
          wl = (*sys.weight)[std::size_t(j1) * n2 + j2];
          wu = (*sys.weight)[std::size_t(j1 + 1) * n2 + j2];
        } else {
          const std::size_t row = std::size_t(j1) * g.flux_n2(2);
          wl = (*sys.weight)[row + j2];
          wu = (*sys.weight)[row + j2 + 1];
        }
      }
      double lo, hi;
      if (sys.alpha == 1) {
        lo = j1 > 0 ? u(j1 - 1, j2) : 0.0;
        hi = j1 + 1 < n1 ? u(j1 + 1, j2) : 0.0;
      } else {
        lo = j2 > 0 ? u(j1, j2 - 1) : 0.0;
        hi = j2 + 1 < n2 ? u(j1, j2 + 1) : 0.0;
      }
      const double uc = u(j1, j2);
      out(j1, j2) = d0 * uc + bih2 * (wl * (uc - lo) + wu * (uc - hi));
    }
  return out;
}

FluxField apply_lines(const LineSystem& sys, const FluxField& q) {
  if (sys.alpha != q.alpha())
    throw std::invalid_argument("apply_lines: direction does not match the flux field");
  check_line_system(sys, q.size(), 0);
  const StaggeredGrid& g = q.grid();
  FluxField out(g, q.alpha());
  const int n1 = q.n1(), n2 = q.n2();
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);
  for (int j1 = 0; j1 < n1; ++j1)
    for (int j2 = 0; j2 < n2; ++j2) {
      const std::size_t fidx = std::size_t(j1) * n2 + j2;
      const double d0 = sys.diag ? (*sys.diag)[fidx] : sys.a;
      const int i = sys.alpha == 1 ? j1 : j2;
      const int len = sys.alpha == 1 ? n1 : n2;
      const double qc = q(j1, j2);
      double acc = 0.0;
      if (i > 0) acc += qc - (sys.alpha == 1 ? q(j1 - 1, j2) : q(j1, j2 - 1));
      if (i < len - 1) acc += qc - (sys.alpha == 1 ? q(j1 + 1, j2) : q(j1, j2 + 1));
      out(j1, j2) = d0 * qc + bih2 * acc;
    }
  return out;
}

ScalarField solve_spd(const ScalarOp& apply, const ScalarField& rhs, const SpdOptions& opt,
                      SolveStats* stats) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("solve_spd: tol must be positive");
  const StaggeredGrid& g = rhs.grid();
  const int max_iter = opt.max_iter > 0 ? opt.max_iter : 10 * int(rhs.size());

  ScalarField x(g);
  const double bnorm = norm_h(rhs);
  if (stats) ++stats->cg_solves;
  if (bnorm == 0.0) return x;

  ScalarField r = rhs;
  ScalarField p = r;
  double rr = inner_h(r, r);
  int it = 0;
  while (it < max_iter) {
    ScalarField ap = apply(p);
    const double pap = inner_h(p, ap);
    if (!(pap > 0.0))
      throw SolveFailure("solve_spd: operator is not positive definite on the Krylov space",
                         std::sqrt(rr) / bnorm, it);
    const double alpha = rr / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_new = inner_h(r, r);
    ++it;
    if (std::sqrt(rr_new) <= opt.tol * bnorm) {
      if (stats) stats->cg_iterations += it;
      return x;
    }
    const double beta = rr_new / rr;
    p = lincomb(1.0, r, beta, p);
    rr = rr_new;
  }
  if (stats) stats->cg_iterations += it;
  throw SolveFailure("solve_spd: no convergence in " + std::to_string(max_iter) +
                         " iterations (relative residual " +
                         std::to_string(std::sqrt(rr) / bnorm) + ")",
                     std::sqrt(rr) / bnorm, it);
}

}  // namespace hhc

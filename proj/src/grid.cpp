#include "hhc/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hhc {

StaggeredGrid build_grid(const GridSpec& spec) {
  if (spec.n1 < 2 || spec.n2 < 2)
    throw std::invalid_argument("build_grid: need at least 2 cells per direction, got " +
                                std::to_string(spec.n1) + "x" + std::to_string(spec.n2));
  if (!(spec.l1 > 0.0) || !(spec.l2 > 0.0))
    throw std::invalid_argument("build_grid: side lengths must be positive");
  StaggeredGrid g;
  g.spec = spec;
  g.h1 = spec.l1 / spec.n1;
  g.h2 = spec.l2 / spec.n2;
  return g;
}

FluxField::FluxField(const StaggeredGrid& g, int alpha) : alpha_(alpha), grid_(g) {
  if (alpha != 1 && alpha != 2)
    throw std::invalid_argument("FluxField: direction must be 1 or 2");
  v_.assign(g.flux_size(alpha), 0.0);
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("scalar fields live on different grids");
}

void require_same_grid(const FluxField& a, const FluxField& b) {
  if (a.alpha() != b.alpha())
    throw std::invalid_argument("flux fields have different directions");
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("flux fields live on different grids");
}

// Row-partial reduction: each row is summed sequentially, rows are combined
// sequentially in index order. Rows may be computed by different threads
// without changing the result.
static double weighted_dot(const std::vector<double>& y, const std::vector<double>& w,
                           int rows, int cols, double weight) {
  std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const double* py = y.data() + std::size_t(r) * cols;
    const double* pw = w.data() + std::size_t(r) * cols;
    double s = 0.0;
    for (int c = 0; c < cols; ++c) s += py[c] * pw[c];
    partial[r] = s;
  }
  double total = 0.0;
  for (int r = 0; r < rows; ++r) total += partial[r];
  return total * weight;
}

double inner_h(const ScalarField& y, const ScalarField& w) {
  require_same_grid(y, w);
  const auto& g = y.grid();
  return weighted_dot(y.values(), w.values(), g.scalar_n1(), g.scalar_n2(), g.h1 * g.h2);
}

double inner_h_alpha(const FluxField& y, const FluxField& w) {
  require_same_grid(y, w);
  const auto& g = y.grid();
  return weighted_dot(y.values(), w.values(), g.flux_n1(y.alpha()), g.flux_n2(y.alpha()),
                      g.h1 * g.h2);
}

double norm_h(const ScalarField& y) { return std::sqrt(inner_h(y, y)); }
double norm_h_alpha(const FluxField& y) { return std::sqrt(inner_h_alpha(y, y)); }

static double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm_inf(const ScalarField& y) { return max_abs(y.values()); }
double norm_inf(const FluxField& y) { return max_abs(y.values()); }

ScalarField sample_scalar(const StaggeredGrid& g, const SpaceFn& f) {
  ScalarField out(g);
  const int n1 = g.scalar_n1(), n2 = g.scalar_n2();
#pragma omp parallel for schedule(static)
  for (int j1 = 0; j1 < n1; ++j1)
    for (int j2 = 0; j2 < n2; ++j2) out(j1, j2) = f(g.scalar_x1(j1), g.scalar_x2(j2));
  for (double v : out.values())
    if (!std::isfinite(v)) throw std::invalid_argument("sample_scalar: non-finite value");
  return out;
}

FluxField sample_flux(const StaggeredGrid& g, int alpha, const SpaceFn& f) {
  FluxField out(g, alpha);
  const int n1 = out.n1(), n2 = out.n2();
#pragma omp parallel for schedule(static)
  for (int j1 = 0; j1 < n1; ++j1)
    for (int j2 = 0; j2 < n2; ++j2)
      out(j1, j2) = f(g.flux_x1(alpha, j1), g.flux_x2(alpha, j2));
  for (double v : out.values())
    if (!std::isfinite(v)) throw std::invalid_argument("sample_flux: non-finite value");
  return out;
}

template <class V>
static void scale_vec(double a, V& v) {
  const std::size_t n = v.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) v[i] *= a;
}

template <class V>
static void axpy_vec(double a, const V& x, V& y) {
  const std::size_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_in_place(double a, ScalarField& y) { scale_vec(a, y.values()); }
void scale_in_place(double a, FluxField& y) { scale_vec(a, y.values()); }

void axpy(double a, const ScalarField& x, ScalarField& y) {
  require_same_grid(x, y);
  axpy_vec(a, x.values(), y.values());
}

void axpy(double a, const FluxField& x, FluxField& y) {
  require_same_grid(x, y);
  axpy_vec(a, x.values(), y.values());
}

ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y) {
  require_same_grid(x, y);
  ScalarField out(x.grid());
  const std::size_t n = out.size();
  auto& o = out.values();
  const auto& xv = x.values();
  const auto& yv = y.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) o[i] = a * xv[i] + b * yv[i];
  return out;
}

FluxField lincomb(double a, const FluxField& x, double b, const FluxField& y) {
  require_same_grid(x, y);
  FluxField out(x.grid(), x.alpha());
  const std::size_t n = out.size();
  auto& o = out.values();
  const auto& xv = x.values();
  const auto& yv = y.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) o[i] = a * xv[i] + b * yv[i];
  return out;
}

void multiply_in_place(const ScalarField& a, ScalarField& y) {
  require_same_grid(a, y);
  const std::size_t n = y.size();
  auto& yv = y.values();
  const auto& av = a.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) yv[i] *= av[i];
}

void multiply_in_place(const FluxField& a, FluxField& y) {
  require_same_grid(a, y);
  const std::size_t n = y.size();
  auto& yv = y.values();
  const auto& av = a.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) yv[i] *= av[i];
}

void divide_in_place(const ScalarField& a, ScalarField& y) {
  require_same_grid(a, y);
  const std::size_t n = y.size();
  auto& yv = y.values();
  const auto& av = a.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) yv[i] /= av[i];
}

void divide_in_place(const FluxField& a, FluxField& y) {
  require_same_grid(a, y);
  const std::size_t n = y.size();
  auto& yv = y.values();
  const auto& av = a.values();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) yv[i] /= av[i];
}

}  // namespace hhc

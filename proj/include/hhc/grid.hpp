#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hhc {

// Rectangle (0,l1) x (0,l2) covered by N1 x N2 uniform cells.
struct GridSpec {
  double l1 = 1.0;
  double l2 = 1.0;
  int n1 = 0;
  int n2 = 0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Staggered layout: temperature at interior cell corners, each heat-flux
// component at the face midpoints of its own direction.
//
//   temperature: (i1*h1, i2*h2)         i1 = 1..N1-1, i2 = 1..N2-1
//   flux 1:      ((i1+0.5)*h1, i2*h2)   i1 = 0..N1-1, i2 = 1..N2-1
//   flux 2:      (i1*h1, (i2+0.5)*h2)   i1 = 1..N1-1, i2 = 0..N2-1
//
// Temperature values on the boundary are identically zero (homogeneous
// Dirichlet) and are never stored. Flux midpoints on the two boundary
// rows/columns of the transverse direction never enter any interior
// stencil and are not stored either.
struct StaggeredGrid {
  GridSpec spec;
  double h1 = 0.0;
  double h2 = 0.0;

  int scalar_n1() const { return spec.n1 - 1; }
  int scalar_n2() const { return spec.n2 - 1; }
  std::size_t scalar_size() const {
    return std::size_t(scalar_n1()) * std::size_t(scalar_n2());
  }

  int flux_n1(int alpha) const { return alpha == 1 ? spec.n1 : spec.n1 - 1; }
  int flux_n2(int alpha) const { return alpha == 1 ? spec.n2 - 1 : spec.n2; }
  std::size_t flux_size(int alpha) const {
    return std::size_t(flux_n1(alpha)) * std::size_t(flux_n2(alpha));
  }

  // Node/midpoint coordinates, arranged so that index N lands on l exactly.
  double node_x1(int i1) const { return i1 * spec.l1 / spec.n1; }
  double node_x2(int i2) const { return i2 * spec.l2 / spec.n2; }
  double mid_x1(int i1) const { return (2 * i1 + 1) * spec.l1 / (2.0 * spec.n1); }
  double mid_x2(int i2) const { return (2 * i2 + 1) * spec.l2 / (2.0 * spec.n2); }

  // Coordinates of stored entries, zero-based storage indices.
  double scalar_x1(int j1) const { return node_x1(j1 + 1); }
  double scalar_x2(int j2) const { return node_x2(j2 + 1); }
  double flux_x1(int alpha, int j1) const {
    return alpha == 1 ? mid_x1(j1) : node_x1(j1 + 1);
  }
  double flux_x2(int alpha, int j2) const {
    return alpha == 1 ? node_x2(j2 + 1) : mid_x2(j2);
  }

  friend bool operator==(const StaggeredGrid&, const StaggeredGrid&) = default;
};

// Validates the spec and derives spacings. Throws std::invalid_argument for
// N_alpha < 2 (no interior temperature node) or non-positive side lengths.
StaggeredGrid build_grid(const GridSpec& spec);

// Grid function over the interior temperature nodes, row-major with the
// direction-1 index slow: value(j1, j2) = v[j1 * scalar_n2 + j2].
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const StaggeredGrid& g)
      : grid_(g), v_(g.scalar_size(), 0.0) {}

  const StaggeredGrid& grid() const { return grid_; }
  int n1() const { return grid_.scalar_n1(); }
  int n2() const { return grid_.scalar_n2(); }
  std::size_t size() const { return v_.size(); }

  double operator()(int j1, int j2) const { return v_[idx(j1, j2)]; }
  double& operator()(int j1, int j2) { return v_[idx(j1, j2)]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

 private:
  std::size_t idx(int j1, int j2) const {
    return std::size_t(j1) * grid_.scalar_n2() + j2;
  }
  StaggeredGrid grid_;
  std::vector<double> v_;
};

// Grid function over the direction-alpha flux midpoints, row-major with the
// direction-1 index slow.
class FluxField {
 public:
  FluxField() = default;
  FluxField(const StaggeredGrid& g, int alpha);

  int alpha() const { return alpha_; }
  const StaggeredGrid& grid() const { return grid_; }
  int n1() const { return grid_.flux_n1(alpha_); }
  int n2() const { return grid_.flux_n2(alpha_); }
  std::size_t size() const { return v_.size(); }

  double operator()(int j1, int j2) const { return v_[idx(j1, j2)]; }
  double& operator()(int j1, int j2) { return v_[idx(j1, j2)]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

 private:
  std::size_t idx(int j1, int j2) const {
    return std::size_t(j1) * grid_.flux_n2(alpha_) + j2;
  }
  int alpha_ = 1;
  StaggeredGrid grid_;
  std::vector<double> v_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b);
void require_same_grid(const FluxField& a, const FluxField& b);

// Discrete inner products: sum of y*w over the index set, weighted by h1*h2.
// The reduction order is fixed (per-row partial sums combined in row order)
// so results are bit-identical across runs and thread counts.
double inner_h(const ScalarField& y, const ScalarField& w);
double inner_h_alpha(const FluxField& y, const FluxField& w);

double norm_h(const ScalarField& y);
double norm_h_alpha(const FluxField& y);
double norm_inf(const ScalarField& y);
double norm_inf(const FluxField& y);

using SpaceFn = std::function<double(double, double)>;

// Pointwise evaluation at node/midpoint coordinates. Throws if the function
// produces a non-finite value anywhere.
ScalarField sample_scalar(const StaggeredGrid& g, const SpaceFn& f);
FluxField sample_flux(const StaggeredGrid& g, int alpha, const SpaceFn& f);

// Small field arithmetic helpers used by the schemes. All are elementwise.
void scale_in_place(double a, ScalarField& y);
void scale_in_place(double a, FluxField& y);
void axpy(double a, const ScalarField& x, ScalarField& y);  // y += a*x
void axpy(double a, const FluxField& x, FluxField& y);
ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y);
FluxField lincomb(double a, const FluxField& x, double b, const FluxField& y);
void multiply_in_place(const ScalarField& a, ScalarField& y);  // y *= a
void multiply_in_place(const FluxField& a, FluxField& y);
void divide_in_place(const ScalarField& a, ScalarField& y);  // y /= a
void divide_in_place(const FluxField& a, FluxField& y);

}  // namespace hhc

#include "hhc/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "hhc/linsolve.hpp"

namespace hhc {

Coefficients make_coefficients(const StaggeredGrid& g, const SpaceFn& c_fn,
                               const SpaceFn& k_fn, double nu, bool parabolic_limit) {
  Coefficients coef;
  coef.c = sample_scalar(g, c_fn);
  coef.k1 = sample_flux(g, 1, k_fn);
  coef.k2 = sample_flux(g, 2, k_fn);
  coef.nu = nu;
  coef.parabolic_limit = parabolic_limit;

  auto min_of = [](const std::vector<double>& v) {
    double m = v[0];
    for (double x : v) m = std::min(m, x);
    return m;
  };
  auto max_of = [](const std::vector<double>& v) {
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    return m;
  };
  coef.c0 = min_of(coef.c.values());
  coef.k0 = std::min(min_of(coef.k1.values()), min_of(coef.k2.values()));
  coef.k1_max = std::max(max_of(coef.k1.values()), max_of(coef.k2.values()));

  if (!(coef.c0 > 0.0)) throw std::invalid_argument("coefficients: c must be positive");
  if (!(coef.k0 > 0.0)) throw std::invalid_argument("coefficients: k must be positive");
  if (nu < 0.0) throw std::invalid_argument("coefficients: nu must be nonnegative");
  if (nu == 0.0 && !parabolic_limit)
    throw std::invalid_argument("coefficients: nu == 0 requires the parabolic-limit flag");

  coef.c_sqrt = coef.c;
  for (double& v : coef.c_sqrt.values()) v = std::sqrt(v);
  coef.c_inv_sqrt = coef.c_sqrt;
  for (double& v : coef.c_inv_sqrt.values()) v = 1.0 / v;
  return coef;
}

SpectralBounds spectral_bounds(const StaggeredGrid& g) {
  const double pi = std::acos(-1.0);
  SpectralBounds b;
  auto s2 = [&](double h, double l) { return std::sin(pi * h / (2.0 * l)); };
  auto c2 = [&](double h, double l) { return std::cos(pi * h / (2.0 * l)); };
  b.delta1 = 4.0 / (g.h1 * g.h1) * s2(g.h1, g.spec.l1) * s2(g.h1, g.spec.l1);
  b.Delta1 = 4.0 / (g.h1 * g.h1) * c2(g.h1, g.spec.l1) * c2(g.h1, g.spec.l1);
  b.delta2 = 4.0 / (g.h2 * g.h2) * s2(g.h2, g.spec.l2) * s2(g.h2, g.spec.l2);
  b.Delta2 = 4.0 / (g.h2 * g.h2) * c2(g.h2, g.spec.l2) * c2(g.h2, g.spec.l2);
  return b;
}

FluxField apply_grad(int alpha, const ScalarField& u) {
  const StaggeredGrid& g = u.grid();
  FluxField out(g, alpha);
  const int n1 = out.n1(), n2 = out.n2();
  if (alpha == 1) {
    const double ih = 1.0 / g.h1;
    const int last = n1 - 1;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n2; ++j2) {
        const double right = j1 < last ? u(j1, j2) : 0.0;
        const double left = j1 > 0 ? u(j1 - 1, j2) : 0.0;
        out(j1, j2) = (right - left) * ih;
      }
    }
  } else if (alpha == 2) {
    const double ih = 1.0 / g.h2;
    const int last = n2 - 1;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n2; ++j2) {
        const double up = j2 < last ? u(j1, j2) : 0.0;
        const double down = j2 > 0 ? u(j1, j2 - 1) : 0.0;
        out(j1, j2) = (up - down) * ih;
      }
    }
  } else {
    throw std::invalid_argument("apply_grad: direction must be 1 or 2");
  }
  return out;
}

ScalarField apply_grad_adjoint(const FluxField& q) {
  const StaggeredGrid& g = q.grid();
  ScalarField out(g);
  const int n1 = out.n1(), n2 = out.n2();
  if (q.alpha() == 1) {
    const double ih = 1.0 / g.h1;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2)
        out(j1, j2) = -(q(j1 + 1, j2) - q(j1, j2)) * ih;
  } else {
    const double ih = 1.0 / g.h2;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2)
        out(j1, j2) = -(q(j1, j2 + 1) - q(j1, j2)) * ih;
  }
  return out;
}

ScalarField apply_diffusion_dir(int alpha, const ScalarField& u, const Coefficients& coef) {
  const StaggeredGrid& g = u.grid();
  require_same_grid(u, coef.c);
  ScalarField out(g);
  const int n1 = out.n1(), n2 = out.n2();
  if (alpha == 1) {
    const double ih2 = 1.0 / (g.h1 * g.h1);
    const FluxField& k = coef.k1;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n2; ++j2) {
        const double uc = u(j1, j2);
        const double ur = j1 + 1 < n1 ? u(j1 + 1, j2) : 0.0;
        const double ul = j1 > 0 ? u(j1 - 1, j2) : 0.0;
        out(j1, j2) = (k(j1, j2) * (uc - ul) - k(j1 + 1, j2) * (ur - uc)) * ih2;
      }
    }
  } else if (alpha == 2) {
    const double ih2 = 1.0 / (g.h2 * g.h2);
    const FluxField& k = coef.k2;
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n2; ++j2) {
        const double uc = u(j1, j2);
        const double uu = j2 + 1 < n2 ? u(j1, j2 + 1) : 0.0;
        const double ud = j2 > 0 ? u(j1, j2 - 1) : 0.0;
        out(j1, j2) = (k(j1, j2) * (uc - ud) - k(j1, j2 + 1) * (uu - uc)) * ih2;
      }
    }
  } else {
    throw std::invalid_argument("apply_diffusion_dir: direction must be 1 or 2");
  }
  return out;
}

ScalarField apply_diffusion(const ScalarField& u, const Coefficients& coef) {
  ScalarField out = apply_diffusion_dir(1, u, coef);
  ScalarField d2 = apply_diffusion_dir(2, u, coef);
  axpy(1.0, d2, out);
  return out;
}

// Single factor E + c * grad_adjoint_a grad_a of the direction product.
static ScalarField apply_unit_factor(int alpha, double c, const ScalarField& u) {
  const StaggeredGrid& g = u.grid();
  ScalarField out(g);
  const int n1 = out.n1(), n2 = out.n2();
  if (alpha == 1) {
    const double w = c / (g.h1 * g.h1);
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) {
        const double ur = j1 + 1 < n1 ? u(j1 + 1, j2) : 0.0;
        const double ul = j1 > 0 ? u(j1 - 1, j2) : 0.0;
        out(j1, j2) = u(j1, j2) + w * (2.0 * u(j1, j2) - ul - ur);
      }
  } else {
    const double w = c / (g.h2 * g.h2);
#pragma omp parallel for schedule(static)
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) {
        const double uu = j2 + 1 < n2 ? u(j1, j2 + 1) : 0.0;
        const double ud = j2 > 0 ? u(j1, j2 - 1) : 0.0;
        out(j1, j2) = u(j1, j2) + w * (2.0 * u(j1, j2) - ud - uu);
      }
  }
  return out;
}

static void check_q_args(double sigma, double tau) {
  if (sigma < 0.0) throw std::invalid_argument("factored operator: sigma must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("factored operator: tau must be > 0");
}

ScalarField apply_q_factored(const ScalarField& u, double sigma, double tau) {
  check_q_args(sigma, tau);
  const double c1 = sigma * tau * tau;
  const double c2 = 0.5 * c1;
  ScalarField out = apply_unit_factor(2, c2, u);
  out = apply_unit_factor(1, c1, out);
  return apply_unit_factor(2, c2, out);
}

ScalarField solve_q_factored(const ScalarField& rhs, double sigma, double tau) {
  check_q_args(sigma, tau);
  const double c1 = sigma * tau * tau;
  const double c2 = 0.5 * c1;
  LineSystem f2{2, 1.0, nullptr, c2, nullptr};
  LineSystem f1{1, 1.0, nullptr, c1, nullptr};
  ScalarField out = solve_lines(f2, rhs);
  out = solve_lines(f1, out);
  return solve_lines(f2, out);
}

ScalarField apply_regularizer(const ScalarField& u, const Coefficients& coef, double sigma,
                              double tau, bool with_k) {
  const double c = sigma * tau * tau;
  if (with_k) {
    ScalarField out = apply_diffusion(u, coef);
    scale_in_place(c, out);
    axpy(1.0, u, out);
    return out;
  }
  ScalarField out = apply_unit_factor(1, c, u);
  ScalarField l2 = apply_unit_factor(2, c, u);
  // out = u + c L1 u, l2 = u + c L2 u; the sum minus u gives u + c(L1+L2)u.
  axpy(1.0, l2, out);
  axpy(-1.0, u, out);
  return out;
}

ScalarField apply_c_split(const ScalarField& u, const Coefficients& coef, double sigma,
                          double tau) {
  if (!(sigma > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("apply_c_split: needs sigma > 0 and tau > 0");
  ScalarField out(u.grid());
  for (int alpha = 1; alpha <= 2; ++alpha) {
    FluxField z = apply_grad(alpha, u);
    std::vector<double> kinv(coef.k(alpha).values());
    for (double& v : kinv) v = 1.0 / v;
    LineSystem sys{alpha, 1.0, &kinv, sigma * tau * tau, nullptr};
    FluxField w = solve_lines(sys, z);
    ScalarField part = apply_grad_adjoint(w);
    axpy(1.0, part, out);
  }
  return out;
}

}  // namespace hhc

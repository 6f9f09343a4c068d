#include "hhc/reference.hpp"

namespace hhc::ref {

FluxField apply_grad(int alpha, const ScalarField& u) {
  const StaggeredGrid& g = u.grid();
  FluxField out(g, alpha);
  const int n1 = out.n1(), n2 = out.n2();
  if (alpha == 1) {
    const double ih = 1.0 / g.h1;
    const int last = n1 - 1;
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) {
        const double right = j1 < last ? u(j1, j2) : 0.0;
        const double left = j1 > 0 ? u(j1 - 1, j2) : 0.0;
        out(j1, j2) = (right - left) * ih;
      }
  } else {
    const double ih = 1.0 / g.h2;
    const int last = n2 - 1;
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) {
        const double up = j2 < last ? u(j1, j2) : 0.0;
        const double down = j2 > 0 ? u(j1, j2 - 1) : 0.0;
        out(j1, j2) = (up - down) * ih;
      }
  }
  return out;
}

ScalarField apply_grad_adjoint(const FluxField& q) {
  const StaggeredGrid& g = q.grid();
  ScalarField out(g);
  const int n1 = out.n1(), n2 = out.n2();
  if (q.alpha() == 1) {
    const double ih = 1.0 / g.h1;
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) out(j1, j2) = -(q(j1 + 1, j2) - q(j1, j2)) * ih;
  } else {
    const double ih = 1.0 / g.h2;
    for (int j1 = 0; j1 < n1; ++j1)
      for (int j2 = 0; j2 < n2; ++j2) out(j1, j2) = -(q(j1, j2 + 1) - q(j1, j2)) * ih;
  }
  return out;
}

ScalarField apply_diffusion_dir(int alpha, const ScalarField& u, const Coefficients& coef) {
  FluxField z = ref::apply_grad(alpha, u);
  const FluxField& k = coef.k(alpha);
  for (std::size_t i = 0; i < z.size(); ++i) z.values()[i] *= k.values()[i];
  return ref::apply_grad_adjoint(z);
}

ScalarField apply_diffusion(const ScalarField& u, const Coefficients& coef) {
  ScalarField out = ref::apply_diffusion_dir(1, u, coef);
  const ScalarField d2 = ref::apply_diffusion_dir(2, u, coef);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += d2.values()[i];
  return out;
}

static double weighted_dot_serial(const std::vector<double>& y, const std::vector<double>& w,
                                  int rows, int cols, double weight) {
  std::vector<double> partial(rows, 0.0);
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
  return weighted_dot_serial(y.values(), w.values(), g.scalar_n1(), g.scalar_n2(),
                             g.h1 * g.h2);
}

double inner_h_alpha(const FluxField& y, const FluxField& w) {
  require_same_grid(y, w);
  const auto& g = y.grid();
  return weighted_dot_serial(y.values(), w.values(), g.flux_n1(y.alpha()),
                             g.flux_n2(y.alpha()), g.h1 * g.h2);
}

namespace {

void thomas(int n, const double* sub, const double* diag, const double* sup, double* x,
            double* work) {
  work[0] = sup[0] / diag[0];
  x[0] = x[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = 1.0 / (diag[i] - sub[i] * work[i - 1]);
    work[i] = sup[i] * m;
    x[i] = (x[i] - sub[i] * x[i - 1]) * m;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= work[i] * x[i + 1];
}

}  // namespace

ScalarField solve_lines(const LineSystem& sys, const ScalarField& rhs) {
  const StaggeredGrid& g = rhs.grid();
  ScalarField x = rhs;
  const int n1 = x.n1(), n2 = x.n2();
  const int len = sys.alpha == 1 ? n1 : n2;
  const int batch = sys.alpha == 1 ? n2 : n1;
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);

  std::vector<double> sub(len), diag(len), sup(len), work(len), xs(len);
  for (int line = 0; line < batch; ++line) {
    for (int i = 0; i < len; ++i) {
      const int j1 = sys.alpha == 1 ? i : line;
      const int j2 = sys.alpha == 1 ? line : i;
      const std::size_t fidx = std::size_t(j1) * n2 + j2;
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
      const double d0 = sys.diag ? (*sys.diag)[fidx] : sys.a;
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
  return x;
}

FluxField solve_lines(const LineSystem& sys, const FluxField& rhs) {
  const StaggeredGrid& g = rhs.grid();
  FluxField x = rhs;
  const int n1 = x.n1(), n2 = x.n2();
  const int len = sys.alpha == 1 ? n1 : n2;
  const int batch = sys.alpha == 1 ? n2 : n1;
  const double h = sys.alpha == 1 ? g.h1 : g.h2;
  const double bih2 = sys.b / (h * h);

  std::vector<double> sub(len), diag(len), sup(len), work(len), xs(len);
  for (int line = 0; line < batch; ++line) {
    for (int i = 0; i < len; ++i) {
      const int j1 = sys.alpha == 1 ? i : line;
      const int j2 = sys.alpha == 1 ? line : i;
      const std::size_t fidx = std::size_t(j1) * n2 + j2;
      const double d0 = sys.diag ? (*sys.diag)[fidx] : sys.a;
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
  return x;
}

}  // namespace hhc::ref

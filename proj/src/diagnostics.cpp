#include "hhc/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hhc {

std::string to_string(EnergyKind kind) {
  switch (kind) {
    case EnergyKind::SWeighted: return "s-weighted";
    case EnergyKind::SExplicit: return "s-explicit";
    case EnergyKind::SQ: return "s-q";
    case EnergyKind::SC: return "s-c";
    case EnergyKind::G: return "g";
  }
  throw std::logic_error("to_string: unknown energy kind");
}

EnergyKind default_energy(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ThreeLevelWeighted:
    case SchemeKind::StaggeredWeightedFlux:
      return EnergyKind::SWeighted;
    case SchemeKind::ThreeLevelExplicit:
    case SchemeKind::StaggeredExplicit:
      return EnergyKind::SExplicit;
    case SchemeKind::LodQ:
    case SchemeKind::RegularizedEquiv:
    case SchemeKind::StaggeredRegularized:
    case SchemeKind::StaggeredAdditiveQ:
      return EnergyKind::SQ;
    case SchemeKind::LodC:
    case SchemeKind::StaggeredFluxPerturbed:
      return EnergyKind::SC;
    case SchemeKind::SystemWeighted:
    case SchemeKind::SplitComponentwiseP2:
    case SchemeKind::SplitComponentwiseP3:
      return EnergyKind::G;
  }
  throw std::logic_error("default_energy: unknown scheme kind");
}

// The regularized time operator of the scheme: c^{1/2} Q c^{1/2} for the
// factored kinds, c^{1/2} (E + s t^2 L) c^{1/2} for the full regularizer.
static ScalarField apply_time_operator(const ScalarField& v, const SchemeConfig& cfg,
                                       const Coefficients& coef) {
  ScalarField inner = v;
  multiply_in_place(coef.c_sqrt, inner);
  ScalarField out;
  if (cfg.kind == SchemeKind::LodQ || cfg.kind == SchemeKind::StaggeredAdditiveQ)
    out = apply_q_factored(inner, cfg.sigma, cfg.tau);
  else
    out = apply_regularizer(inner, coef, cfg.sigma, cfg.tau, cfg.k_in_reduced_operator);
  multiply_in_place(coef.c_sqrt, out);
  return out;
}

double energy_pair(EnergyKind kind, const ScalarField& u, const ScalarField& u_prev,
                   const SchemeConfig& cfg, const Coefficients& coef) {
  const double tau = cfg.tau;
  const ScalarField eta = lincomb(1.0 / tau, u, -1.0 / tau, u_prev);
  const ScalarField zeta = lincomb(0.5, u, 0.5, u_prev);
  ScalarField c_eta = eta;
  multiply_in_place(coef.c, c_eta);
  const double t2 = tau * tau;

  switch (kind) {
    case EnergyKind::SWeighted: {
      const ScalarField d_eta = apply_diffusion(eta, coef);
      return coef.nu * inner_h(c_eta, eta) + (cfg.sigma - 0.25) * t2 * inner_h(d_eta, eta) +
             inner_h(apply_diffusion(zeta, coef), zeta);
    }
    case EnergyKind::SExplicit: {
      const ScalarField d_eta = apply_diffusion(eta, coef);
      return coef.nu * inner_h(c_eta, eta) - 0.25 * t2 * inner_h(d_eta, eta) +
             inner_h(apply_diffusion(zeta, coef), zeta);
    }
    case EnergyKind::SQ: {
      const ScalarField m_eta = apply_time_operator(eta, cfg, coef);
      const ScalarField d_eta = apply_diffusion(eta, coef);
      return coef.nu * inner_h(m_eta, eta) - 0.25 * t2 * inner_h(d_eta, eta) +
             inner_h(apply_diffusion(zeta, coef), zeta);
    }
    case EnergyKind::SC: {
      const ScalarField c_op_eta = apply_c_split(eta, coef, cfg.sigma, tau);
      return coef.nu * inner_h(c_eta, eta) - 0.25 * t2 * inner_h(c_op_eta, eta) +
             inner_h(apply_c_split(zeta, coef, cfg.sigma, tau), zeta);
    }
    case EnergyKind::G:
      throw std::invalid_argument("energy_pair: G acts on a vector state");
  }
  throw std::logic_error("energy_pair: unknown kind");
}

double energy_vector(const ScalarField& u, const FluxField& q1, const FluxField& q2,
                     const Coefficients& coef) {
  ScalarField cu = u;
  multiply_in_place(coef.c, cu);
  double g = inner_h(cu, u);
  FluxField w1 = q1;
  divide_in_place(coef.k1, w1);
  g += coef.nu * inner_h_alpha(w1, q1);
  FluxField w2 = q2;
  divide_in_place(coef.k2, w2);
  g += coef.nu * inner_h_alpha(w2, q2);
  return g;
}

// (c^{-1} y, y)
static double weighted_source_norm(const ScalarField& y, const Coefficients& coef) {
  ScalarField w = y;
  divide_in_place(coef.c, w);
  return inner_h(w, y);
}

static EnergyRecord make_record(int n, double t, double value, double bound) {
  EnergyRecord r;
  r.n = n;
  r.t = t;
  r.value = value;
  r.bound_rhs = bound;
  r.slack = bound - value;
  // Either the per-step bound fails, or the functional loses the positivity
  // that makes it a squared norm. The second flag is the one that detects
  // instability of the explicit kinds: their telescoping identity keeps the
  // bound true for any step size while S dives below zero.
  const bool bound_violated = r.slack < -1e-10 * std::max(1.0, std::abs(value));
  const bool positivity_violated = value < -1e-10 * std::max(1.0, std::abs(bound));
  r.violated = bound_violated || positivity_violated;
  return r;
}

RunResult run_scheme(const Problem& p, const GridSpec& gs, SchemeConfig cfg,
                     const RunOptions& opt) {
  validate_problem(p);
  const StaggeredGrid g = build_grid(gs);
  const Coefficients coef = problem_coefficients(p, g);

  int steps;
  if (opt.fixed_steps > 0) {
    steps = opt.fixed_steps;
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("run_scheme: tau must be positive");
  } else {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("run_scheme: tau must be positive");
    steps = std::max(1, int(std::ceil(p.T / cfg.tau - 1e-9)));
    cfg.tau = p.T / steps;
  }

  RunResult res;
  res.tau = cfg.tau;
  res.steps = steps;
  res.energy_kind = default_energy(cfg.kind);
  const SchemeFamily fam = family_of(cfg.kind);
  const auto t0 = std::chrono::steady_clock::now();

  auto push_record = [&](const EnergyRecord& r) {
    res.energy.push_back(r);
    if (r.violated) ++res.violations;
  };
  auto s_bound = [&](double prev_energy, double t_before) {
    const ScalarField phi = scheme_phi(cfg.kind, p, g, t_before, cfg.tau);
    return prev_energy + 0.5 * cfg.tau * weighted_source_norm(phi, coef);
  };
  auto g_bound = [&](double prev_energy, double t_before, double sigma_eff) {
    const ScalarField fh = sample_source(p, g, t_before + 0.5 * cfg.tau);
    return std::exp(4.0 * cfg.tau / p.T) * prev_energy +
           cfg.tau * p.T * std::exp((2.0 * sigma_eff - 1.0) * cfg.tau / p.T) *
               weighted_source_norm(fh, coef);
  };

  if (fam == SchemeFamily::ThreeLevel || fam == SchemeFamily::Staggered) {
    // The start consumes the first step: the loop advances n = 1 .. steps-1.
    ScalarField u_prev, u_curr;
    ThreeLevelState ts;
    StaggeredState ss;
    const bool staggered = fam == SchemeFamily::Staggered;
    if (staggered) {
      ss = init_staggered(p, g, coef, cfg);
      u_prev = ss.u_prev;
      u_curr = ss.u;
    } else {
      ts = start_threelevel(p, g, coef, cfg);
      u_prev = ts.u_prev;
      u_curr = ts.u_curr;
    }
    if (opt.record_levels) {
      res.levels.push_back(u_prev);
      res.levels.push_back(u_curr);
    }
    double e = 0.0;
    if (opt.monitor) {
      e = energy_pair(res.energy_kind, u_curr, u_prev, cfg, coef);
      push_record(make_record(1, cfg.tau, e, e));
    }
    for (int n = 1; n < steps; ++n) {
      const double t_before = staggered ? ss.t : ts.t;
      if (staggered) {
        ss = step_staggered(ss, cfg, p, coef, &res.stats);
        u_prev = ss.u_prev;
        u_curr = ss.u;
      } else {
        ts = step_threelevel(ts, cfg, p, coef, &res.stats);
        u_prev = ts.u_prev;
        u_curr = ts.u_curr;
      }
      if (opt.record_levels) res.levels.push_back(u_curr);
      if (opt.monitor) {
        const double e_new = energy_pair(res.energy_kind, u_curr, u_prev, cfg, coef);
        push_record(make_record(n + 1, t_before + cfg.tau, e_new, s_bound(e, t_before)));
        e = e_new;
      }
    }
    res.u_final = u_curr;
    if (staggered) {
      res.q1_final = ss.q1;
      res.q2_final = ss.q2;
    }
  } else {
    VectorState vs = init_vector(p, g, coef);
    const double sigma_eff = fam == SchemeFamily::System ? cfg.sigma : 0.5;
    if (opt.record_levels) res.levels.push_back(vs.u);
    double e = 0.0;
    if (opt.monitor) {
      e = energy_vector(vs.u, vs.q1, vs.q2, coef);
      push_record(make_record(0, 0.0, e, e));
    }
    for (int n = 0; n < steps; ++n) {
      const double t_before = vs.t;
      vs = fam == SchemeFamily::System ? step_system_weighted(vs, cfg, p, coef, &res.stats)
                                       : step_componentwise(vs, cfg, p, coef, &res.stats);
      if (opt.record_levels) res.levels.push_back(vs.u);
      if (opt.monitor) {
        const double e_new = energy_vector(vs.u, vs.q1, vs.q2, coef);
        push_record(make_record(n + 1, vs.t, e_new, g_bound(e, t_before, sigma_eff)));
        e = e_new;
      }
    }
    res.u_final = vs.u;
    res.q1_final = vs.q1;
    res.q2_final = vs.q2;
  }

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double equivalence_residual(EquivalenceKind kind, const std::vector<ScalarField>& levels,
                            const Problem& p, const SchemeConfig& cfg,
                            const Coefficients& coef) {
  if (levels.size() < 3)
    throw std::invalid_argument("equivalence_residual: need at least 3 temperature levels");
  const StaggeredGrid& g = levels[0].grid();
  const double tau = cfg.tau;
  const double nu = coef.nu;

  double worst = 0.0;
  for (std::size_t n = 1; n + 1 < levels.size(); ++n) {
    const ScalarField& um = levels[n - 1];
    const ScalarField& uc = levels[n];
    const ScalarField& up = levels[n + 1];
    const double t = double(n) * tau;

    // nu * Mop(d2) + Mop(d0) with Mop the scheme's time operator.
    ScalarField d2 = lincomb(1.0 / (tau * tau), up, 1.0 / (tau * tau), um);
    axpy(-2.0 / (tau * tau), uc, d2);
    ScalarField d0 = lincomb(1.0 / (2.0 * tau), up, -1.0 / (2.0 * tau), um);

    ScalarField t2, t1;
    if (kind == EquivalenceKind::ExplicitThreeLevel) {
      t2 = d2;
      multiply_in_place(coef.c, t2);
      scale_in_place(nu, t2);
      t1 = d0;
      multiply_in_place(coef.c, t1);
    } else {
      ScalarField inner = d2;
      multiply_in_place(coef.c_sqrt, inner);
      t2 = apply_regularizer(inner, coef, cfg.sigma, tau, cfg.k_in_reduced_operator);
      multiply_in_place(coef.c_sqrt, t2);
      scale_in_place(nu, t2);
      inner = d0;
      multiply_in_place(coef.c_sqrt, inner);
      t1 = apply_regularizer(inner, coef, cfg.sigma, tau, cfg.k_in_reduced_operator);
      multiply_in_place(coef.c_sqrt, t1);
    }
    const ScalarField du = apply_diffusion(uc, coef);
    const ScalarField phi = source_half_phi(p, g, t, tau);

    ScalarField r = t2;
    axpy(1.0, t1, r);
    axpy(1.0, du, r);
    axpy(-1.0, phi, r);

    const double denom = std::max({norm_inf(t2), norm_inf(t1), norm_inf(du), norm_inf(phi)});
    if (denom > 0.0) worst = std::max(worst, norm_inf(r) / denom);
  }
  return worst;
}

double split_correspondence_max_diff(const Problem& p, const GridSpec& gs, double sigma,
                                     double tau, int steps) {
  const StaggeredGrid g = build_grid(gs);
  const Coefficients coef = problem_coefficients(p, g);

  SchemeConfig scfg;
  scfg.kind = SchemeKind::StaggeredFluxPerturbed;
  scfg.sigma = sigma;
  scfg.tau = tau;

  StaggeredState ss = init_staggered(p, g, coef, scfg);

  SchemeConfig tcfg = scfg;
  tcfg.kind = SchemeKind::LodC;
  ThreeLevelState ts;
  ts.u_prev = ss.u_prev;
  ts.u_curr = ss.u;
  ts.n = 1;
  ts.t = ss.t;

  double worst = 0.0;
  for (int n = 1; n < steps; ++n) {
    ss = step_staggered(ss, scfg, p, coef);
    ts = step_threelevel(ts, tcfg, p, coef);
    const ScalarField diff = lincomb(1.0, ss.u, -1.0, ts.u_curr);
    const double scale = std::max(norm_inf(ts.u_curr), 1e-300);
    worst = std::max(worst, norm_inf(diff) / scale);
  }
  return worst;
}

namespace {

const double kPi = std::acos(-1.0);

struct SeparableMode {
  double l1, l2, omega, nu;
  double lam;  // continuous eigenvalue pi^2 (1/l1^2 + 1/l2^2)
  double P, R;

  SeparableMode(double l1_, double l2_, double omega_, double nu_)
      : l1(l1_), l2(l2_), omega(omega_), nu(nu_) {
    lam = kPi * kPi * (1.0 / (l1 * l1) + 1.0 / (l2 * l2));
    const double d = 1.0 + nu * nu * omega * omega;
    P = 1.0 / d;
    R = nu * omega / d;
  }

  double s(double x1, double x2) const {
    return std::sin(kPi * x1 / l1) * std::sin(kPi * x2 / l2);
  }
  double s1(double x1, double x2) const {
    return kPi / l1 * std::cos(kPi * x1 / l1) * std::sin(kPi * x2 / l2);
  }
  double s2(double x1, double x2) const {
    return kPi / l2 * std::sin(kPi * x1 / l1) * std::cos(kPi * x2 / l2);
  }
};

}  // namespace

const std::vector<std::string>& manufactured_ids() {
  static const std::vector<std::string> ids = {"m1", "m1-homogeneous", "m2", "m3"};
  return ids;
}

Problem manufactured_problem(const std::string& id, const ManufacturedParams& prm) {
  const SeparableMode m(prm.l1, prm.l2, prm.omega, prm.nu);
  Problem p;
  p.name = id;
  p.nu = prm.nu;
  p.parabolic_limit = prm.nu == 0.0;
  p.T = prm.T;
  p.c_fn = [](double, double) { return 1.0; };
  p.v0 = [m](double x1, double x2) { return m.s(x1, x2); };
  p.v1 = [](double, double) { return 0.0; };

  if (id == "m1" || id == "m3") {
    p.k_fn = [](double, double) { return 1.0; };
    p.g0_1 = [m](double x1, double x2) { return -m.P * m.s1(x1, x2); };
    p.g0_2 = [m](double x1, double x2) { return -m.P * m.s2(x1, x2); };
    p.f = [m](double x1, double x2, double t) {
      return m.s(x1, x2) *
             (m.lam * m.P * std::cos(m.omega * t) + (m.lam * m.R - m.omega) * std::sin(m.omega * t));
    };
    p.df_dt = [m](double x1, double x2, double t) {
      return m.s(x1, x2) * m.omega *
             (-m.lam * m.P * std::sin(m.omega * t) + (m.lam * m.R - m.omega) * std::cos(m.omega * t));
    };
    p.u_exact = [m](double x1, double x2, double t) {
      return m.s(x1, x2) * std::cos(m.omega * t);
    };
    p.q1_exact = [m](double x1, double x2, double t) {
      return -m.s1(x1, x2) * (m.P * std::cos(m.omega * t) + m.R * std::sin(m.omega * t));
    };
    p.q2_exact = [m](double x1, double x2, double t) {
      return -m.s2(x1, x2) * (m.P * std::cos(m.omega * t) + m.R * std::sin(m.omega * t));
    };
    return p;
  }

  if (id == "m1-homogeneous") {
    p.k_fn = [](double, double) { return 1.0; };
    p.g0_1 = [m](double x1, double x2) { return -m.s1(x1, x2); };
    p.g0_2 = [m](double x1, double x2) { return -m.s2(x1, x2); };
    return p;  // f, df_dt, exact fields stay empty
  }

  if (id == "m2") {
    p.k_fn = [](double x1, double) { return 1.0 + 0.5 * x1; };
    // -div(k grad s) = lam k s - 0.5 s1  (grad k = (0.5, 0))
    auto W = [m](double x1, double x2) {
      return m.lam * (1.0 + 0.5 * x1) * m.s(x1, x2) - 0.5 * m.s1(x1, x2);
    };
    p.g0_1 = [m](double x1, double x2) { return -m.P * (1.0 + 0.5 * x1) * m.s1(x1, x2); };
    p.g0_2 = [m](double x1, double x2) { return -m.P * (1.0 + 0.5 * x1) * m.s2(x1, x2); };
    p.f = [m, W](double x1, double x2, double t) {
      const double w = W(x1, x2);
      return m.P * w * std::cos(m.omega * t) +
             (m.R * w - m.omega * m.s(x1, x2)) * std::sin(m.omega * t);
    };
    p.df_dt = [m, W](double x1, double x2, double t) {
      const double w = W(x1, x2);
      return m.omega * (-m.P * w * std::sin(m.omega * t) +
                        (m.R * w - m.omega * m.s(x1, x2)) * std::cos(m.omega * t));
    };
    p.u_exact = [m](double x1, double x2, double t) {
      return m.s(x1, x2) * std::cos(m.omega * t);
    };
    p.q1_exact = [m](double x1, double x2, double t) {
      return -(1.0 + 0.5 * x1) * m.s1(x1, x2) *
             (m.P * std::cos(m.omega * t) + m.R * std::sin(m.omega * t));
    };
    p.q2_exact = [m](double x1, double x2, double t) {
      return -(1.0 + 0.5 * x1) * m.s2(x1, x2) *
             (m.P * std::cos(m.omega * t) + m.R * std::sin(m.omega * t));
    };
    return p;
  }

  throw std::invalid_argument("manufactured_problem: unknown id '" + id + "'");
}

Problem top_mode_problem(const GridSpec& gs, double nu, double T) {
  Problem p;
  p.name = "top-mode";
  p.nu = nu;
  p.T = T;
  p.c_fn = [](double, double) { return 1.0; };
  p.k_fn = [](double, double) { return 1.0; };
  const double a1 = kPi * (gs.n1 - 1) / gs.l1;
  const double a2 = kPi * (gs.n2 - 1) / gs.l2;
  p.v0 = [a1, a2](double x1, double x2) { return std::sin(a1 * x1) * std::sin(a2 * x2); };
  p.v1 = [](double, double) { return 0.0; };
  return p;
}

std::vector<ConvergenceRow> convergence_study(const Problem& p, const SchemeConfig& cfg,
                                              const std::vector<LadderRung>& ladder,
                                              const ReferenceAtT* reference) {
  if (!reference && !p.u_exact)
    throw std::invalid_argument(
        "convergence_study: problem has no exact solution and no reference was given");

  std::vector<ConvergenceRow> rows;
  for (const LadderRung& rung : ladder) {
    SchemeConfig rc = cfg;
    rc.tau = rung.tau;
    RunOptions opt;
    opt.monitor = false;
    const RunResult run = run_scheme(p, rung.grid, rc, opt);
    const StaggeredGrid g = build_grid(rung.grid);

    ScalarField target;
    if (reference) {
      target = (*reference)(g);
    } else {
      target = sample_scalar(
          g, [&](double x1, double x2) { return p.u_exact(x1, x2, p.T); });
    }
    const ScalarField err = lincomb(1.0, run.u_final, -1.0, target);

    ConvergenceRow row;
    row.h1 = g.h1;
    row.h2 = g.h2;
    row.tau = run.tau;
    row.err_max = norm_inf(err);
    row.err_l2 = norm_h(err);
    row.order_max = std::nan("");
    row.order_l2 = std::nan("");
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double rh1 = prev.h1 / row.h1;
      const double rh2 = prev.h2 / row.h2;
      const double rt = prev.tau / row.tau;
      const bool tau_halved = std::abs(rt - 2.0) < 1e-9;
      const bool space_ok = (std::abs(rh1 - 2.0) < 1e-9 && std::abs(rh2 - 2.0) < 1e-9) ||
                            (std::abs(rh1 - 1.0) < 1e-12 && std::abs(rh2 - 1.0) < 1e-12);
      if (tau_halved && space_ok) {
        if (row.err_max > 0.0 && prev.err_max > 0.0)
          row.order_max = std::log2(prev.err_max / row.err_max);
        if (row.err_l2 > 0.0 && prev.err_l2 > 0.0)
          row.order_l2 = std::log2(prev.err_l2 / row.err_l2);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

double growth_factor(const std::vector<ScalarField>& levels) {
  if (levels.size() < 3)
    throw std::invalid_argument("growth_factor: need at least 3 levels");
  auto amp = [&](std::size_t i) {
    const double a = norm_h(levels[i]);
    const double b = norm_h(levels[i - 1]);
    return std::sqrt(a * a + b * b);
  };
  const double a_first = amp(1);
  const double a_last = amp(levels.size() - 1);
  if (a_first == 0.0) return a_last == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::pow(a_last / a_first, 1.0 / double(levels.size() - 2));
}

}  // namespace hhc

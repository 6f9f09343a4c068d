#include "hhc/schemes.hpp"

#include <cmath>

namespace hhc {

void validate_problem(const Problem& p) {
  if (!p.v0) throw std::invalid_argument("problem: initial temperature v0 is required");
  if (!(p.T > 0.0)) throw std::invalid_argument("problem: final time T must be positive");
  if (!p.has_v1() && !p.has_g0())
    throw std::invalid_argument("problem: either v1 or the initial flux g0 must be given");
  if (p.nu < 0.0) throw std::invalid_argument("problem: nu must be nonnegative");
  if (p.nu == 0.0 && !p.parabolic_limit)
    throw std::invalid_argument("problem: nu == 0 requires the parabolic-limit flag");
}

Coefficients problem_coefficients(const Problem& p, const StaggeredGrid& g) {
  SpaceFn one = [](double, double) { return 1.0; };
  return make_coefficients(g, p.c_fn ? p.c_fn : one, p.k_fn ? p.k_fn : one, p.nu,
                           p.parabolic_limit);
}

SchemeFamily family_of(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ThreeLevelWeighted:
    case SchemeKind::ThreeLevelExplicit:
    case SchemeKind::LodQ:
    case SchemeKind::LodC:
    case SchemeKind::RegularizedEquiv:
      return SchemeFamily::ThreeLevel;
    case SchemeKind::SystemWeighted:
      return SchemeFamily::System;
    case SchemeKind::StaggeredExplicit:
    case SchemeKind::StaggeredWeightedFlux:
    case SchemeKind::StaggeredRegularized:
    case SchemeKind::StaggeredAdditiveQ:
    case SchemeKind::StaggeredFluxPerturbed:
      return SchemeFamily::Staggered;
    case SchemeKind::SplitComponentwiseP2:
    case SchemeKind::SplitComponentwiseP3:
      return SchemeFamily::Componentwise;
  }
  throw std::logic_error("family_of: unknown kind");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ThreeLevelWeighted: return "threelevel-weighted";
    case SchemeKind::ThreeLevelExplicit: return "threelevel-explicit";
    case SchemeKind::LodQ: return "lod-q";
    case SchemeKind::LodC: return "lod-c";
    case SchemeKind::RegularizedEquiv: return "threelevel-regularized-equiv";
    case SchemeKind::SystemWeighted: return "system-weighted";
    case SchemeKind::StaggeredExplicit: return "staggered-explicit";
    case SchemeKind::StaggeredWeightedFlux: return "staggered-weightedflux";
    case SchemeKind::StaggeredRegularized: return "staggered-regularized";
    case SchemeKind::StaggeredAdditiveQ: return "staggered-additive-q";
    case SchemeKind::StaggeredFluxPerturbed: return "staggered-flux-perturbed";
    case SchemeKind::SplitComponentwiseP2: return "split-componentwise-p2";
    case SchemeKind::SplitComponentwiseP3: return "split-componentwise-p3";
  }
  throw std::logic_error("to_string: unknown kind");
}

const std::vector<SchemeKind>& public_scheme_kinds() {
  static const std::vector<SchemeKind> kinds = {
      SchemeKind::ThreeLevelWeighted,    SchemeKind::ThreeLevelExplicit,
      SchemeKind::LodQ,                  SchemeKind::LodC,
      SchemeKind::SystemWeighted,        SchemeKind::StaggeredExplicit,
      SchemeKind::StaggeredWeightedFlux, SchemeKind::StaggeredRegularized,
      SchemeKind::StaggeredAdditiveQ,    SchemeKind::StaggeredFluxPerturbed,
      SchemeKind::SplitComponentwiseP2,  SchemeKind::SplitComponentwiseP3,
  };
  return kinds;
}

std::optional<SchemeKind> parse_scheme_kind(const std::string& name) {
  for (SchemeKind k : public_scheme_kinds())
    if (to_string(k) == name) return k;
  if (name == to_string(SchemeKind::RegularizedEquiv)) return SchemeKind::RegularizedEquiv;
  return std::nullopt;
}

double explicit_stability_limit(const StaggeredGrid& g, const Coefficients& coef) {
  if (!(coef.nu > 0.0))
    throw std::invalid_argument("explicit_stability_limit: requires nu > 0");
  const SpectralBounds b = spectral_bounds(g);
  return std::sqrt(4.0 * coef.nu * coef.c0 / (coef.k1_max * (b.Delta1 + b.Delta2)));
}

std::vector<std::string> stability_prechecks(const SchemeConfig& cfg, const StaggeredGrid& g,
                                             const Coefficients& coef, double T) {
  std::vector<std::string> notes;
  const double nus = coef.nu * coef.c0 * cfg.sigma;
  auto warn_sigma = [&](double threshold) {
    if (cfg.sigma < threshold)
      notes.push_back("scheme '" + to_string(cfg.kind) +
                      "' is unconditionally stable only for sigma >= " +
                      std::to_string(threshold) + " (sigma = " + std::to_string(cfg.sigma) +
                      ")");
  };
  auto warn_nucs = [&](double threshold) {
    if (nus < threshold)
      notes.push_back("scheme '" + to_string(cfg.kind) +
                      "' is unconditionally stable only for nu*c0*sigma >= " +
                      std::to_string(threshold) + " (nu*c0*sigma = " + std::to_string(nus) +
                      ")");
  };
  auto warn_cfl = [&]() {
    if (!(coef.nu > 0.0)) {
      notes.push_back("explicit scheme requires nu > 0");
      return;
    }
    const double tmax = explicit_stability_limit(g, coef);
    if (cfg.tau > tmax * (1.0 + 1e-12))
      notes.push_back("explicit scheme is stable only for tau <= " + std::to_string(tmax) +
                      " (tau = " + std::to_string(cfg.tau) + ")");
  };

  switch (cfg.kind) {
    case SchemeKind::ThreeLevelWeighted:
    case SchemeKind::StaggeredWeightedFlux:
      warn_sigma(0.25);
      break;
    case SchemeKind::ThreeLevelExplicit:
    case SchemeKind::StaggeredExplicit:
      warn_cfl();
      break;
    case SchemeKind::LodQ:
    case SchemeKind::RegularizedEquiv:
    case SchemeKind::StaggeredRegularized:
    case SchemeKind::StaggeredAdditiveQ:
      warn_nucs(0.25);
      break;
    case SchemeKind::LodC:
    case SchemeKind::StaggeredFluxPerturbed:
      warn_nucs(0.5);
      break;
    case SchemeKind::SystemWeighted:
      warn_sigma(0.5);
      if (2.0 * cfg.tau > T)
        notes.push_back("the per-step energy bound of 'system-weighted' assumes 2*tau <= T "
                        "(tau = " + std::to_string(cfg.tau) + ", T = " + std::to_string(T) +
                        ")");
      break;
    case SchemeKind::SplitComponentwiseP2:
    case SchemeKind::SplitComponentwiseP3:
      break;  // unconditionally stable
  }
  return notes;
}

ScalarField sample_source(const Problem& p, const StaggeredGrid& g, double t) {
  if (!p.f) return ScalarField(g);
  return sample_scalar(g, [&](double x1, double x2) { return p.f(x1, x2, t); });
}

ScalarField source_integer_phi(const Problem& p, const StaggeredGrid& g, double t,
                               double tau) {
  if (!p.f) return ScalarField(g);
  ScalarField phi = sample_source(p, g, t);
  if (p.nu != 0.0) {
    const ScalarField fp = sample_source(p, g, t + tau);
    const ScalarField fm = sample_source(p, g, t - tau);
    axpy(p.nu / (2.0 * tau), fp, phi);
    axpy(-p.nu / (2.0 * tau), fm, phi);
  }
  return phi;
}

ScalarField source_half_phi(const Problem& p, const StaggeredGrid& g, double t, double tau) {
  if (!p.f) return ScalarField(g);
  const ScalarField fp = sample_source(p, g, t + 0.5 * tau);
  const ScalarField fm = sample_source(p, g, t - 0.5 * tau);
  ScalarField phi = lincomb(0.5 + p.nu / tau, fp, 0.5 - p.nu / tau, fm);
  return phi;
}

ScalarField scheme_phi(SchemeKind kind, const Problem& p, const StaggeredGrid& g, double t,
                       double tau) {
  switch (kind) {
    case SchemeKind::ThreeLevelWeighted:
    case SchemeKind::ThreeLevelExplicit:
      return source_integer_phi(p, g, t, tau);
    default:
      return source_half_phi(p, g, t, tau);
  }
}

namespace {

// Rate recovered from the divergence equation when v1 is absent:
// c u_t(0) = f(0) + sum_a grad_adjoint_a g0_a.
ScalarField initial_rate(const Problem& p, const StaggeredGrid& g, const Coefficients& coef) {
  if (p.has_v1())
    return sample_scalar(g, p.v1);
  if (!p.has_g0())
    throw std::invalid_argument("problem provides neither v1 nor g0");
  ScalarField rate = sample_source(p, g, 0.0);
  axpy(1.0, apply_grad_adjoint(sample_flux(g, 1, p.g0_1)), rate);
  axpy(1.0, apply_grad_adjoint(sample_flux(g, 2, p.g0_2)), rate);
  divide_in_place(coef.c, rate);
  return rate;
}

ScalarField sample_df_dt(const Problem& p, const StaggeredGrid& g, double t) {
  if (!p.df_dt) return ScalarField(g);
  return sample_scalar(g, [&](double x1, double x2) { return p.df_dt(x1, x2, t); });
}

void require_positive_nu(const SchemeConfig& cfg, const Coefficients& coef) {
  if (!(coef.nu > 0.0))
    throw std::invalid_argument("scheme '" + to_string(cfg.kind) + "' requires nu > 0");
}

void check_cfl(const SchemeConfig& cfg, const StaggeredGrid& g, const Coefficients& coef) {
  const double tmax = explicit_stability_limit(g, coef);
  if (cfg.tau > tmax * (1.0 + 1e-12) && !cfg.override_stability)
    throw StabilityViolation("explicit step refused: tau = " + std::to_string(cfg.tau) +
                             " exceeds tau_max = " + std::to_string(tmax) +
                             " (use the stability override to run anyway)");
}

FluxField initial_flux(const Problem& p, const StaggeredGrid& g, const Coefficients& coef,
                       int alpha) {
  if (p.has_g0()) return sample_flux(g, alpha, alpha == 1 ? p.g0_1 : p.g0_2);
  // Relaxed flux -k grad v0 when no g0 is given.
  FluxField q = apply_grad(alpha, sample_scalar(g, p.v0));
  multiply_in_place(coef.k(alpha), q);
  scale_in_place(-1.0, q);
  return q;
}

}  // namespace

ThreeLevelState start_threelevel(const Problem& p, const StaggeredGrid& g,
                                 const Coefficients& coef, const SchemeConfig& cfg) {
  validate_problem(p);
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("start_threelevel: tau must be positive");
  const double tau = cfg.tau;
  ScalarField u0 = sample_scalar(g, p.v0);
  ScalarField rate = initial_rate(p, g, coef);

  ScalarField w0 = rate;
  if (cfg.second_order_start) {
    if (coef.nu > 0.0) {
      // u_tt(0) = (f(0) + nu f_t(0) - c v1 - D v0) / (nu c)
      ScalarField utt = sample_source(p, g, 0.0);
      axpy(coef.nu, sample_df_dt(p, g, 0.0), utt);
      ScalarField cv1 = rate;
      multiply_in_place(coef.c, cv1);
      axpy(-1.0, cv1, utt);
      axpy(-1.0, apply_diffusion(u0, coef), utt);
      divide_in_place(coef.c, utt);
      scale_in_place(1.0 / coef.nu, utt);
      axpy(0.5 * tau, utt, w0);
    } else {
      // Parabolic limit: the rate is determined by the equation itself.
      ScalarField ut = sample_source(p, g, 0.0);
      axpy(-1.0, apply_diffusion(u0, coef), ut);
      divide_in_place(coef.c, ut);
      ScalarField utt = sample_df_dt(p, g, 0.0);
      axpy(-1.0, apply_diffusion(ut, coef), utt);
      divide_in_place(coef.c, utt);
      w0 = ut;
      axpy(0.5 * tau, utt, w0);
    }
  }

  ThreeLevelState s;
  s.u_prev = u0;
  s.u_curr = lincomb(1.0, u0, tau, w0);
  s.n = 1;
  s.t = tau;
  return s;
}

ThreeLevelState step_threelevel(const ThreeLevelState& s, const SchemeConfig& cfg,
                                const Problem& p, const Coefficients& coef,
                                SolveStats* stats) {
  const StaggeredGrid& g = s.u_curr.grid();
  const double tau = cfg.tau;
  const double nu = coef.nu;
  const double beta_plus = nu / (tau * tau) + 1.0 / (2.0 * tau);
  const double beta_zero = 2.0 * nu / (tau * tau);
  const double beta_minus = nu / (tau * tau) - 1.0 / (2.0 * tau);

  // c ⊙ (beta_zero u^n - beta_minus u^{n-1}): the known part of the
  // time-difference terms.
  auto time_rhs = [&]() {
    ScalarField r = lincomb(beta_zero, s.u_curr, -beta_minus, s.u_prev);
    multiply_in_place(coef.c, r);
    return r;
  };
  auto divide_by_c_beta = [&](ScalarField& r) {
    divide_in_place(coef.c, r);
    scale_in_place(1.0 / beta_plus, r);
  };

  ScalarField u_next(g);
  switch (cfg.kind) {
    case SchemeKind::ThreeLevelWeighted: {
      ScalarField rhs = source_integer_phi(p, g, s.t, tau);
      axpy(1.0, time_rhs(), rhs);
      const ScalarField mid =
          lincomb(1.0 - 2.0 * cfg.sigma, s.u_curr, cfg.sigma, s.u_prev);
      axpy(-1.0, apply_diffusion(mid, coef), rhs);
      if (cfg.sigma == 0.0) {
        u_next = rhs;
        divide_by_c_beta(u_next);
      } else {
        auto op = [&](const ScalarField& v) {
          ScalarField out = v;
          multiply_in_place(coef.c, out);
          scale_in_place(beta_plus, out);
          axpy(cfg.sigma, apply_diffusion(v, coef), out);
          return out;
        };
        u_next = solve_spd(op, rhs, {cfg.solver_tol, cfg.solver_max_iter}, stats);
      }
      break;
    }
    case SchemeKind::ThreeLevelExplicit: {
      require_positive_nu(cfg, coef);
      check_cfl(cfg, g, coef);
      ScalarField rhs = source_integer_phi(p, g, s.t, tau);
      axpy(1.0, time_rhs(), rhs);
      axpy(-1.0, apply_diffusion(s.u_curr, coef), rhs);
      u_next = rhs;
      divide_by_c_beta(u_next);
      break;
    }
    case SchemeKind::LodQ: {
      require_positive_nu(cfg, coef);
      ScalarField r = source_half_phi(p, g, s.t, tau);
      axpy(-1.0, apply_diffusion(s.u_curr, coef), r);
      multiply_in_place(coef.c_inv_sqrt, r);
      ScalarField x = solve_q_factored(r, cfg.sigma, tau);
      if (stats) stats->line_sweeps += 3;
      multiply_in_place(coef.c_inv_sqrt, x);
      u_next = lincomb(beta_zero / beta_plus, s.u_curr, -beta_minus / beta_plus, s.u_prev);
      axpy(1.0 / beta_plus, x, u_next);
      break;
    }
    case SchemeKind::LodC: {
      require_positive_nu(cfg, coef);
      ScalarField rhs = source_half_phi(p, g, s.t, tau);
      axpy(1.0, time_rhs(), rhs);
      axpy(-1.0, apply_c_split(s.u_curr, coef, cfg.sigma, tau), rhs);
      if (stats) stats->line_sweeps += 2;
      u_next = rhs;
      divide_by_c_beta(u_next);
      break;
    }
    case SchemeKind::RegularizedEquiv: {
      require_positive_nu(cfg, coef);
      ScalarField r = source_half_phi(p, g, s.t, tau);
      axpy(-1.0, apply_diffusion(s.u_curr, coef), r);
      ScalarField x(g);
      if (cfg.sigma == 0.0) {
        x = r;
        divide_in_place(coef.c, x);
      } else {
        auto op = [&](const ScalarField& v) {
          ScalarField inner = v;
          multiply_in_place(coef.c_sqrt, inner);
          ScalarField out =
              apply_regularizer(inner, coef, cfg.sigma, tau, cfg.k_in_reduced_operator);
          multiply_in_place(coef.c_sqrt, out);
          return out;
        };
        x = solve_spd(op, r, {cfg.solver_tol, cfg.solver_max_iter}, stats);
      }
      u_next = lincomb(beta_zero / beta_plus, s.u_curr, -beta_minus / beta_plus, s.u_prev);
      axpy(1.0 / beta_plus, x, u_next);
      break;
    }
    default:
      throw std::invalid_argument("step_threelevel: '" + to_string(cfg.kind) +
                                  "' is not a three-level kind");
  }

  ThreeLevelState next;
  next.u_prev = s.u_curr;
  next.u_curr = std::move(u_next);
  next.n = s.n + 1;
  next.t = s.t + tau;
  return next;
}

VectorState init_vector(const Problem& p, const StaggeredGrid& g, const Coefficients& coef) {
  validate_problem(p);
  VectorState s;
  s.u = sample_scalar(g, p.v0);
  s.q1 = initial_flux(p, g, coef, 1);
  s.q2 = initial_flux(p, g, coef, 2);
  s.n = 0;
  s.t = 0.0;
  return s;
}

VectorState step_system_weighted(const VectorState& s, const SchemeConfig& cfg,
                                 const Problem& p, const Coefficients& coef,
                                 SolveStats* stats) {
  const StaggeredGrid& g = s.u.grid();
  const double tau = cfg.tau;
  const double sigma = cfg.sigma;
  const double nu = coef.nu;
  if (!(nu > 0.0) && !(sigma > 0.0))
    throw std::invalid_argument("system-weighted: nu == 0 requires sigma > 0");
  const double mu = nu + sigma * tau;

  // chi_a = (nu - (1-sigma) tau) q^n_a - (1-sigma) tau k grad_a u^n
  auto make_chi = [&](int alpha) {
    FluxField grad = apply_grad(alpha, s.u);
    multiply_in_place(coef.k(alpha), grad);
    FluxField chi = lincomb(nu - (1.0 - sigma) * tau, alpha == 1 ? s.q1 : s.q2,
                            -(1.0 - sigma) * tau, grad);
    return chi;
  };
  const FluxField chi1 = make_chi(1);
  const FluxField chi2 = make_chi(2);

  // phi = c u^n + (1-sigma) tau sum grad_adjoint q^n + tau f^{n+1/2}
  ScalarField phi = s.u;
  multiply_in_place(coef.c, phi);
  axpy((1.0 - sigma) * tau, apply_grad_adjoint(s.q1), phi);
  axpy((1.0 - sigma) * tau, apply_grad_adjoint(s.q2), phi);
  axpy(tau, sample_source(p, g, s.t + 0.5 * tau), phi);

  // (nu + sigma tau) c u' + sigma^2 tau^2 sum grad_adjoint_a (w grad_a) u'
  //   = (nu + sigma tau) phi + sigma tau sum grad_adjoint_a chi_a
  ScalarField rhs = phi;
  scale_in_place(mu, rhs);
  axpy(sigma * tau, apply_grad_adjoint(chi1), rhs);
  axpy(sigma * tau, apply_grad_adjoint(chi2), rhs);

  ScalarField u_next(g);
  if (sigma == 0.0) {
    u_next = rhs;
    divide_in_place(coef.c, u_next);
    scale_in_place(1.0 / mu, u_next);
  } else {
    const double s2t2 = sigma * sigma * tau * tau;
    auto op = [&](const ScalarField& v) {
      ScalarField out = v;
      multiply_in_place(coef.c, out);
      scale_in_place(mu, out);
      for (int alpha = 1; alpha <= 2; ++alpha) {
        FluxField grad = apply_grad(alpha, v);
        if (cfg.k_in_reduced_operator) multiply_in_place(coef.k(alpha), grad);
        axpy(s2t2, apply_grad_adjoint(grad), out);
      }
      return out;
    };
    u_next = solve_spd(op, rhs, {cfg.solver_tol, cfg.solver_max_iter}, stats);
  }

  // q'_a = (chi_a - sigma tau k grad_a u') / (nu + sigma tau)
  auto recover = [&](int alpha, const FluxField& chi) {
    FluxField grad = apply_grad(alpha, u_next);
    multiply_in_place(coef.k(alpha), grad);
    return lincomb(1.0 / mu, chi, -sigma * tau / mu, grad);
  };

  VectorState next;
  next.q1 = recover(1, chi1);
  next.q2 = recover(2, chi2);
  next.u = std::move(u_next);
  next.n = s.n + 1;
  next.t = s.t + tau;
  return next;
}

StaggeredState init_staggered(const Problem& p, const StaggeredGrid& g,
                              const Coefficients& coef, const SchemeConfig& cfg) {
  validate_problem(p);
  require_positive_nu(cfg, coef);
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("init_staggered: tau must be positive");
  const double tau = cfg.tau;

  ScalarField u0 = sample_scalar(g, p.v0);
  StaggeredState s;
  s.q1 = initial_flux(p, g, coef, 1);
  s.q2 = initial_flux(p, g, coef, 2);
  if (cfg.second_order_start) {
    // q^{1/2} = g0 + (tau/2) dq/dt(0), dq/dt(0) = -(g0 + k grad v0)/nu
    for (int alpha = 1; alpha <= 2; ++alpha) {
      FluxField& q = alpha == 1 ? s.q1 : s.q2;
      FluxField rate = apply_grad(alpha, u0);
      multiply_in_place(coef.k(alpha), rate);
      axpy(1.0, q, rate);
      axpy(-0.5 * tau / coef.nu, rate, q);
    }
  }

  // u^1 from the kind's own temperature update at n = 0.
  ScalarField rhs = apply_grad_adjoint(s.q1);
  axpy(1.0, apply_grad_adjoint(s.q2), rhs);
  axpy(1.0, sample_source(p, g, 0.5 * tau), rhs);
  ScalarField du(g);
  switch (cfg.kind) {
    case SchemeKind::StaggeredRegularized: {
      if (cfg.sigma == 0.0) {
        du = rhs;
        divide_in_place(coef.c, du);
      } else {
        auto op = [&](const ScalarField& v) {
          ScalarField inner = v;
          multiply_in_place(coef.c_sqrt, inner);
          ScalarField out =
              apply_regularizer(inner, coef, cfg.sigma, tau, cfg.k_in_reduced_operator);
          multiply_in_place(coef.c_sqrt, out);
          return out;
        };
        du = solve_spd(op, rhs, {cfg.solver_tol, cfg.solver_max_iter});
      }
      break;
    }
    case SchemeKind::StaggeredAdditiveQ: {
      multiply_in_place(coef.c_inv_sqrt, rhs);
      du = solve_q_factored(rhs, cfg.sigma, tau);
      multiply_in_place(coef.c_inv_sqrt, du);
      break;
    }
    default:
      du = rhs;
      divide_in_place(coef.c, du);
      break;
  }
  s.u = lincomb(1.0, u0, tau, du);
  s.u_prev = std::move(u0);
  s.n = 1;
  s.t = tau;
  return s;
}

StaggeredState step_staggered(const StaggeredState& s, const SchemeConfig& cfg,
                              const Problem& p, const Coefficients& coef, SolveStats* stats) {
  const StaggeredGrid& g = s.u.grid();
  const double tau = cfg.tau;
  const double nu = coef.nu;
  require_positive_nu(cfg, coef);
  const double lo = 2.0 * nu - tau;
  const double hi = 2.0 * nu + tau;

  // Leapfrog flux update against a supplied temperature combination:
  // q^{n+1/2} = ((2nu - tau) q^{n-1/2} - 2 tau k grad_a u*) / (2nu + tau).
  auto flux_update = [&](int alpha, const ScalarField& ustar) {
    FluxField grad = apply_grad(alpha, ustar);
    multiply_in_place(coef.k(alpha), grad);
    return lincomb(lo / hi, alpha == 1 ? s.q1 : s.q2, -2.0 * tau / hi, grad);
  };
  // Explicit temperature update (divergence equation) from fresh fluxes.
  auto temp_update = [&](const FluxField& q1, const FluxField& q2) {
    ScalarField du = apply_grad_adjoint(q1);
    axpy(1.0, apply_grad_adjoint(q2), du);
    axpy(1.0, sample_source(p, g, s.t + 0.5 * tau), du);
    divide_in_place(coef.c, du);
    return lincomb(1.0, s.u, tau, du);
  };

  StaggeredState next;
  switch (cfg.kind) {
    case SchemeKind::StaggeredExplicit: {
      check_cfl(cfg, g, coef);
      next.q1 = flux_update(1, s.u);
      next.q2 = flux_update(2, s.u);
      next.u = temp_update(next.q1, next.q2);
      break;
    }
    case SchemeKind::StaggeredWeightedFlux: {
      // Temperature first, through the unconditionally stable three-level
      // form, then the flux update against the weighted combination.
      const double beta_plus = nu / (tau * tau) + 1.0 / (2.0 * tau);
      const double beta_zero = 2.0 * nu / (tau * tau);
      const double beta_minus = nu / (tau * tau) - 1.0 / (2.0 * tau);
      ScalarField rhs = source_half_phi(p, g, s.t, tau);
      ScalarField tr = lincomb(beta_zero, s.u, -beta_minus, s.u_prev);
      multiply_in_place(coef.c, tr);
      axpy(1.0, tr, rhs);
      const ScalarField mid = lincomb(1.0 - 2.0 * cfg.sigma, s.u, cfg.sigma, s.u_prev);
      axpy(-1.0, apply_diffusion(mid, coef), rhs);
      ScalarField u_next(g);
      if (cfg.sigma == 0.0) {
        u_next = rhs;
        divide_in_place(coef.c, u_next);
        scale_in_place(1.0 / beta_plus, u_next);
      } else {
        auto op = [&](const ScalarField& v) {
          ScalarField out = v;
          multiply_in_place(coef.c, out);
          scale_in_place(beta_plus, out);
          axpy(cfg.sigma, apply_diffusion(v, coef), out);
          return out;
        };
        u_next = solve_spd(op, rhs, {cfg.solver_tol, cfg.solver_max_iter}, stats);
      }
      ScalarField ustar = lincomb(cfg.sigma, u_next, 1.0 - 2.0 * cfg.sigma, s.u);
      axpy(cfg.sigma, s.u_prev, ustar);
      next.q1 = flux_update(1, ustar);
      next.q2 = flux_update(2, ustar);
      next.u = std::move(u_next);
      break;
    }
    case SchemeKind::StaggeredRegularized: {
      next.q1 = flux_update(1, s.u);
      next.q2 = flux_update(2, s.u);
      ScalarField rhs = apply_grad_adjoint(next.q1);
      axpy(1.0, apply_grad_adjoint(next.q2), rhs);
      axpy(1.0, sample_source(p, g, s.t + 0.5 * tau), rhs);
      ScalarField w(g);
      if (cfg.sigma == 0.0) {
        w = rhs;
        divide_in_place(coef.c, w);
      } else {
        auto op = [&](const ScalarField& v) {
          ScalarField inner = v;
          multiply_in_place(coef.c_sqrt, inner);
          ScalarField out =
              apply_regularizer(inner, coef, cfg.sigma, tau, cfg.k_in_reduced_operator);
          multiply_in_place(coef.c_sqrt, out);
          return out;
        };
        w = solve_spd(op, rhs, {cfg.solver_tol, cfg.solver_max_iter}, stats);
      }
      next.u = lincomb(1.0, s.u, tau, w);
      break;
    }
    case SchemeKind::StaggeredAdditiveQ: {
      next.q1 = flux_update(1, s.u);
      next.q2 = flux_update(2, s.u);
      ScalarField rhs = apply_grad_adjoint(next.q1);
      axpy(1.0, apply_grad_adjoint(next.q2), rhs);
      axpy(1.0, sample_source(p, g, s.t + 0.5 * tau), rhs);
      multiply_in_place(coef.c_inv_sqrt, rhs);
      ScalarField w = solve_q_factored(rhs, cfg.sigma, tau);
      if (stats) stats->line_sweeps += 3;
      multiply_in_place(coef.c_inv_sqrt, w);
      next.u = lincomb(1.0, s.u, tau, w);
      break;
    }
    case SchemeKind::StaggeredFluxPerturbed: {
      // Flux update with the perturbed time-derivative operator: the common
      // factor (k^{-1} E + sigma tau^2 grad_a grad_adjoint_a) is inverted on
      // the gradient term only.
      for (int alpha = 1; alpha <= 2; ++alpha) {
        FluxField z = apply_grad(alpha, s.u);
        std::vector<double> kinv(coef.k(alpha).values());
        for (double& v : kinv) v = 1.0 / v;
        LineSystem sys{alpha, 1.0, &kinv, cfg.sigma * tau * tau, nullptr};
        FluxField w = solve_lines(sys, z, stats);
        FluxField qn = lincomb(lo / hi, alpha == 1 ? s.q1 : s.q2, -2.0 * tau / hi, w);
        (alpha == 1 ? next.q1 : next.q2) = std::move(qn);
      }
      next.u = temp_update(next.q1, next.q2);
      break;
    }
    default:
      throw std::invalid_argument("step_staggered: '" + to_string(cfg.kind) +
                                  "' is not a staggered kind");
  }

  next.u_prev = s.u;
  next.n = s.n + 1;
  next.t = s.t + tau;
  return next;
}

namespace {

enum class SplitPart { Dir1, Dir2, Diag };

std::vector<SplitPart> substep_sequence(int p) {
  using S = SplitPart;
  if (p == 3) return {S::Dir1, S::Dir2, S::Diag, S::Diag, S::Dir2, S::Dir1};
  return {S::Dir1, S::Dir2, S::Dir2, S::Dir1};
}

}  // namespace

VectorState step_componentwise(const VectorState& s, const SchemeConfig& cfg,
                               const Problem& p, const Coefficients& coef,
                               SolveStats* stats) {
  const StaggeredGrid& g = s.u.grid();
  const double tau = cfg.tau;
  const double nu = coef.nu;
  const int parts = cfg.kind == SchemeKind::SplitComponentwiseP2   ? 2
                    : cfg.kind == SchemeKind::SplitComponentwiseP3 ? 3
                                                                   : 0;
  if (parts == 0)
    throw std::invalid_argument("step_componentwise: '" + to_string(cfg.kind) +
                                "' is not a componentwise kind");
  if (!(nu > 0.0))
    throw std::invalid_argument("componentwise splitting requires nu > 0");

  const ScalarField f_half = sample_source(p, g, s.t + 0.5 * tau);
  const auto seq = substep_sequence(parts);
  const int nsub = int(seq.size());

  // Each substep is a Cayley half-step (B + dt2 A~) x' = (B - dt2 A~) x with
  // dt2 = tau/4: every part appears twice per cycle, so the pair advances it
  // by tau. With dt2 = tau/2 the cycle would integrate the doubled operator.
  const double dt2 = 0.25 * tau;
  // Diagonal coefficients of the flux rows: nu (p=3 keeps the k^{-1} block
  // in its own substeps, p=2 spreads half of it over both direction substeps).
  const double a_plus = parts == 3 ? nu : nu + 0.5 * dt2;
  const double a_minus = parts == 3 ? nu : nu - 0.5 * dt2;

  VectorState cur = s;
  for (int sub = 0; sub < nsub; ++sub) {
    const double f_weight = cfg.source_split == SourceSplit::Even ? 1.0 / nsub
                            : sub == 0                            ? 1.0
                                                                  : 0.0;
    if (seq[sub] == SplitPart::Diag) {
      const double ratio = (nu - dt2) / (nu + dt2);
      scale_in_place(ratio, cur.q1);
      scale_in_place(ratio, cur.q2);
      if (f_weight != 0.0) {
        ScalarField du = f_half;
        divide_in_place(coef.c, du);
        axpy(tau * f_weight, du, cur.u);
      }
      continue;
    }

    const int alpha = seq[sub] == SplitPart::Dir1 ? 1 : 2;
    FluxField& q_a = alpha == 1 ? cur.q1 : cur.q2;
    FluxField& q_o = alpha == 1 ? cur.q2 : cur.q1;

    // r_a = a_minus k^{-1} q_a - dt2 grad_a u
    FluxField r_a = q_a;
    divide_in_place(coef.k(alpha), r_a);
    scale_in_place(a_minus, r_a);
    axpy(-dt2, apply_grad(alpha, cur.u), r_a);
    // r_u = c u + dt2 grad_adjoint_a q_a + tau w f
    ScalarField r_u = cur.u;
    multiply_in_place(coef.c, r_u);
    axpy(dt2, apply_grad_adjoint(q_a), r_u);
    if (f_weight != 0.0) axpy(tau * f_weight, f_half, r_u);

    // Eliminated temperature equation:
    // (a_plus c + dt2^2 grad_adjoint_a k grad_a) u' = a_plus r_u
    //   + dt2 grad_adjoint_a (k r_a)
    ScalarField rhs_u = r_u;
    scale_in_place(a_plus, rhs_u);
    FluxField kr = r_a;
    multiply_in_place(coef.k(alpha), kr);
    axpy(dt2, apply_grad_adjoint(kr), rhs_u);

    std::vector<double> diag(coef.c.values());
    for (double& v : diag) v *= a_plus;
    LineSystem sys{alpha, 1.0, &diag, dt2 * dt2, &coef.k(alpha).values()};
    ScalarField u_new = solve_lines(sys, rhs_u, stats);

    // q_a' = k (r_a - dt2 grad_a u') / a_plus
    FluxField q_new = r_a;
    axpy(-dt2, apply_grad(alpha, u_new), q_new);
    multiply_in_place(coef.k(alpha), q_new);
    scale_in_place(1.0 / a_plus, q_new);

    // Passive flux row: a_plus k^{-1} q_o' = a_minus k^{-1} q_o
    scale_in_place(a_minus / a_plus, q_o);

    q_a = std::move(q_new);
    cur.u = std::move(u_new);
  }

  cur.n = s.n + 1;
  cur.t = s.t + tau;
  return cur;
}

}  // namespace hhc

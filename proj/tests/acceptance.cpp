// Acceptance suite: one pass/fail line per criterion, every tolerance
// pinned in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hhc/parallel.hpp"
#include "hhc/runner.hpp"
#include "support/oracles.hpp"

using namespace hhc;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), sec, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

Coefficients unit_coefficients(const StaggeredGrid& g) {
  return make_coefficients(
      g, [](double, double) { return 1.0; }, [](double, double) { return 1.0; }, 1.0);
}

// ---------------------------------------------------------------------------

bool adjointness(std::string& detail) {
  std::mt19937 rng(101);
  double worst = 0.0;
  for (const GridSpec spec :
       {GridSpec{1.0, 1.0, 3, 3}, GridSpec{1.0, 1.0, 4, 5}, GridSpec{1.0, 1.0, 8, 8}}) {
    const StaggeredGrid g = build_grid(spec);
    for (int alpha : {1, 2}) {
      for (int rep = 0; rep < 100; ++rep) {
        const ScalarField y = oracle::random_scalar(g, rng);
        const FluxField w = oracle::random_flux(g, alpha, rng);
        const double lhs = inner_h_alpha(apply_grad(alpha, y), w);
        const double rhs = inner_h(y, apply_grad_adjoint(w));
        const double scale = norm_h(y) * norm_h_alpha(w);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, 1e-300));
      }
    }
  }
  detail = "max |(grad y, w) - (y, adj w)| / (|y||w|) = " + std::to_string(worst);
  return worst <= 1e-13;
}

bool spectral(std::string& detail) {
  double worst = 0.0;
  for (const GridSpec spec :
       {GridSpec{1.0, 1.0, 3, 3}, GridSpec{1.0, 1.0, 4, 4}, GridSpec{1.0, 2.0, 5, 6},
        GridSpec{1.0, 1.0, 6, 6}}) {
    const StaggeredGrid g = build_grid(spec);
    const Coefficients coef = unit_coefficients(g);
    const SpectralBounds b = spectral_bounds(g);
    for (int alpha : {1, 2}) {
      const dense::Matrix M = dense::assemble_scalar_op(
          g, [&](const ScalarField& u) { return apply_diffusion_dir(alpha, u, coef); });
      const std::vector<double> ev = dense::sym_eigenvalues(M);
      worst = std::max(worst, std::abs(ev.front() - b.delta(alpha)));
      worst = std::max(worst, std::abs(ev.back() - b.Delta(alpha)));
    }
  }
  detail = "max |extreme eigenvalue - closed form| = " + std::to_string(worst);
  return worst <= 1e-10;
}

bool operator_order(std::string& detail) {
  const double pi = std::acos(-1.0);
  std::vector<double> errs;
  for (int n : {8, 16, 32, 64}) {
    const StaggeredGrid g = build_grid({1.0, 1.0, n, n});
    const Coefficients coef = make_coefficients(
        g, [](double, double) { return 1.0; },
        [](double x1, double) { return 1.0 + 0.5 * x1; }, 1.0);
    const ScalarField u = sample_scalar(g, [&](double x1, double x2) {
      return std::sin(pi * x1) * std::sin(pi * x2);
    });
    const ScalarField exact = sample_scalar(g, [&](double x1, double x2) {
      return 2.0 * pi * pi * (1.0 + 0.5 * x1) * std::sin(pi * x1) * std::sin(pi * x2) -
             0.5 * pi * std::cos(pi * x1) * std::sin(pi * x2);
    });
    errs.push_back(norm_inf(lincomb(1.0, apply_diffusion(u, coef), -1.0, exact)));
  }
  std::ostringstream ss;
  bool ok = true;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    ss << (i > 1 ? ", " : "") << "order " << order;
    ok = ok && order >= 1.9;
  }
  detail = ss.str();
  return ok;
}

bool theorem1_monitor(std::string& detail) {
  int total_violations = 0;
  for (const char* id : {"m1", "m1-homogeneous"}) {
    for (double sigma : {0.25, 0.5, 1.0}) {
      const Problem p = manufactured_problem(id);
      SchemeConfig cfg;
      cfg.kind = SchemeKind::ThreeLevelWeighted;
      cfg.sigma = sigma;
      cfg.tau = p.T / 200.0;
      cfg.solver_tol = 1e-12;
      RunOptions opt;
      opt.fixed_steps = 200;
      const RunResult run = run_scheme(p, {1.0, 1.0, 8, 8}, cfg, opt);
      total_violations += run.violations;
    }
  }
  detail = "violations = " + std::to_string(total_violations) + " over 6 runs x 200 steps";
  return total_violations == 0;
}

bool theorem2_monitor(std::string& detail) {
  int total_violations = 0;
  for (double sigma : {0.5, 1.0}) {
    const Problem p = manufactured_problem("m1");
    SchemeConfig cfg;
    cfg.kind = SchemeKind::SystemWeighted;
    cfg.sigma = sigma;
    cfg.tau = p.T / 200.0;  // 2 tau <= T
    cfg.solver_tol = 1e-12;
    RunOptions opt;
    opt.fixed_steps = 200;
    const RunResult run = run_scheme(p, {1.0, 1.0, 8, 8}, cfg, opt);
    total_violations += run.violations;
  }
  detail = "violations = " + std::to_string(total_violations) + " over 2 runs x 200 steps";
  return total_violations == 0;
}

bool cfl_sharpness(std::string& detail) {
  const GridSpec gs{1.0, 1.0, 4, 4};
  const StaggeredGrid g = build_grid(gs);
  const Problem p = top_mode_problem(gs, 1.0, 1.0);
  const Coefficients coef = problem_coefficients(p, g);
  const double tau_max = explicit_stability_limit(g, coef);
  if (std::abs(tau_max - 0.19135) > 1e-4) {
    detail = "tau_max = " + std::to_string(tau_max) + " is off the closed form";
    return false;
  }

  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelExplicit;
  cfg.sigma = 0.0;
  cfg.second_order_start = false;
  RunOptions opt;
  opt.record_levels = true;

  cfg.tau = 0.98 * tau_max;
  opt.fixed_steps = 200;
  const RunResult below = run_scheme(p, gs, cfg, opt);
  if (below.violations != 0 || growth_factor(below.levels) > 1.0) {
    detail = "growth below the limit: factor " + std::to_string(growth_factor(below.levels)) +
             ", violations " + std::to_string(below.violations);
    return false;
  }

  cfg.tau = 1.02 * tau_max;
  cfg.override_stability = true;
  opt.fixed_steps = 50;
  const RunResult above = run_scheme(p, gs, cfg, opt);
  int first_violation = -1;
  for (const EnergyRecord& r : above.energy)
    if (r.violated) {
      first_violation = r.n;
      break;
    }
  if (first_violation < 0 || first_violation > 50) {
    detail = "no violation within 50 steps above the limit";
    return false;
  }
  // Monotone growth of the level amplitudes over the last 10 steps.
  bool monotone = true;
  const auto& lv = above.levels;
  for (std::size_t i = lv.size() - 10; i < lv.size(); ++i)
    monotone = monotone && norm_h(lv[i]) > norm_h(lv[i - 1]);
  detail = "tau_max = " + std::to_string(tau_max) + ", first violation at step " +
           std::to_string(first_violation) + ", growth factor " +
           std::to_string(growth_factor(above.levels));
  return monotone;
}

bool equivalences(std::string& detail) {
  const GridSpec gs{1.0, 1.0, 6, 6};
  const StaggeredGrid g = build_grid(gs);
  const Problem p = manufactured_problem("m1");
  const Coefficients coef = problem_coefficients(p, g);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::StaggeredExplicit;
  cfg.sigma = 0.5;
  cfg.tau = 0.02;
  RunOptions opt;
  opt.monitor = false;
  opt.record_levels = true;
  opt.fixed_steps = 40;
  const RunResult explicit_run = run_scheme(p, gs, cfg, opt);
  const double r_explicit = equivalence_residual(EquivalenceKind::ExplicitThreeLevel,
                                                 explicit_run.levels, p, cfg, coef);

  SchemeConfig rcfg = cfg;
  rcfg.kind = SchemeKind::StaggeredRegularized;
  rcfg.solver_tol = 1e-13;
  const RunResult reg_run = run_scheme(p, gs, rcfg, opt);
  const double r_reg = equivalence_residual(EquivalenceKind::RegularizedThreeLevel,
                                            reg_run.levels, p, rcfg, coef);

  const double r_pair = split_correspondence_max_diff(p, gs, 0.75, 0.02, 100);

  std::ostringstream ss;
  ss << "explicit " << r_explicit << ", regularized " << r_reg << ", correspondence "
     << r_pair;
  detail = ss.str();
  return r_explicit <= 1e-11 && r_reg <= 1e-11 && r_pair <= 1e-10;
}

bool convergence_orders(std::string& detail) {
  ManufacturedParams prm;
  prm.omega = 5.0;  // clean separation of the error components
  const Problem p = manufactured_problem("m1", prm);

  struct Case {
    SchemeKind kind;
    double sigma;
  };
  const Case cases[] = {
      {SchemeKind::ThreeLevelWeighted, 0.5}, {SchemeKind::SystemWeighted, 0.5},
      {SchemeKind::LodQ, 0.25},              {SchemeKind::LodC, 0.5},
      {SchemeKind::SplitComponentwiseP2, 0.5}, {SchemeKind::SplitComponentwiseP3, 0.5},
  };

  std::ostringstream ss;
  bool ok = true;
  for (const Case& c : cases) {
    SchemeConfig cfg;
    cfg.kind = c.kind;
    cfg.sigma = c.sigma;
    cfg.solver_tol = 1e-12;
    std::vector<LadderRung> ladder;
    double tau = p.T / 8.0;
    for (int n = 8; n <= 64; n *= 2) {
      ladder.push_back({GridSpec{1.0, 1.0, n, n}, tau});
      tau *= 0.5;
    }
    const auto rows = convergence_study(p, cfg, ladder);
    const double order = rows.back().order_l2;
    ss << to_string(c.kind) << " " << order << "; ";
    ok = ok && order >= 1.8 && order <= 2.2;
  }

  // Temporal-only refinement at sigma = 1 degrades to first order.
  {
    const Problem p1 = manufactured_problem("m1");
    const GridSpec gs{1.0, 1.0, 16, 16};
    SchemeConfig ref_cfg;
    ref_cfg.kind = SchemeKind::SystemWeighted;
    ref_cfg.sigma = 0.5;
    ref_cfg.tau = p1.T / 640.0;
    RunOptions opt;
    opt.monitor = false;
    const ScalarField ref_final = run_scheme(p1, gs, ref_cfg, opt).u_final;
    ReferenceAtT ref = [&](const StaggeredGrid&) { return ref_final; };

    SchemeConfig cfg;
    cfg.kind = SchemeKind::SystemWeighted;
    cfg.sigma = 1.0;
    const std::vector<LadderRung> ladder{
        {gs, p1.T / 10.0}, {gs, p1.T / 20.0}, {gs, p1.T / 40.0}};
    const auto rows = convergence_study(p1, cfg, ladder, &ref);
    const double order = rows.back().order_l2;
    ss << "system-weighted sigma=1 temporal " << order;
    ok = ok && order >= 0.8 && order <= 1.2;
  }
  detail = ss.str();
  return ok;
}

bool dense_oracle(std::string& detail) {
  const double pi = std::acos(-1.0);
  const GridSpec gs{1.0, 1.0, 4, 4};
  const StaggeredGrid g = build_grid(gs);
  Problem p;
  p.name = "oracle";
  p.nu = 0.8;
  p.T = 1.0;
  p.c_fn = [](double x1, double x2) { return 1.0 + 0.3 * x1 * x2; };
  p.k_fn = [](double x1, double x2) { return 1.0 + 0.5 * x1 + 0.2 * x2; };
  p.v0 = [pi](double x1, double x2) { return std::sin(pi * x1) * x2 * (1.0 - x2); };
  p.v1 = [](double, double) { return 0.0; };
  p.f = [pi](double x1, double x2, double t) {
    return (0.3 + x1 * x2) * std::cos(3.0 * t) + 0.2 * std::sin(pi * x1) * x2;
  };
  p.df_dt = [pi](double x1, double x2, double t) {
    return -3.0 * (0.3 + x1 * x2) * std::sin(3.0 * t);
  };
  const Coefficients coef = problem_coefficients(p, g);
  const oracle::Ops ops = oracle::make_ops(g, coef);
  std::mt19937 rng(211);

  double worst = 0.0;
  std::string worst_kind;
  for (SchemeKind kind : public_scheme_kinds()) {
    SchemeConfig cfg;
    cfg.kind = kind;
    cfg.sigma = 0.6;
    cfg.tau = 0.05;
    cfg.solver_tol = 1e-13;
    cfg.override_stability = true;

    oracle::DenseState ds;
    ds.u_prev = oracle::random_scalar(g, rng).values();
    ds.u = oracle::random_scalar(g, rng).values();
    ds.q1 = oracle::random_flux(g, 1, rng).values();
    ds.q2 = oracle::random_flux(g, 2, rng).values();
    const double t = 0.15;
    const oracle::DenseState expect = oracle::dense_step(kind, ops, coef, cfg, p, t, ds);

    auto rel = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
      }
      return num / std::max(den, 1e-300);
    };

    double d = 0.0;
    const SchemeFamily fam = family_of(kind);
    if (fam == SchemeFamily::ThreeLevel) {
      ThreeLevelState s;
      s.u_prev = ScalarField(g);
      s.u_prev.values() = ds.u_prev;
      s.u_curr = ScalarField(g);
      s.u_curr.values() = ds.u;
      s.t = t;
      d = rel(step_threelevel(s, cfg, p, coef).u_curr.values(), expect.u);
    } else if (fam == SchemeFamily::Staggered) {
      StaggeredState s;
      s.u_prev = ScalarField(g);
      s.u_prev.values() = ds.u_prev;
      s.u = ScalarField(g);
      s.u.values() = ds.u;
      s.q1 = FluxField(g, 1);
      s.q1.values() = ds.q1;
      s.q2 = FluxField(g, 2);
      s.q2.values() = ds.q2;
      s.t = t;
      const StaggeredState next = step_staggered(s, cfg, p, coef);
      d = std::max({rel(next.u.values(), expect.u), rel(next.q1.values(), expect.q1),
                    rel(next.q2.values(), expect.q2)});
    } else {
      VectorState s;
      s.q1 = FluxField(g, 1);
      s.q1.values() = ds.q1;
      s.q2 = FluxField(g, 2);
      s.q2.values() = ds.q2;
      s.u = ScalarField(g);
      s.u.values() = ds.u;
      s.t = t;
      const VectorState next = fam == SchemeFamily::System
                                   ? step_system_weighted(s, cfg, p, coef)
                                   : step_componentwise(s, cfg, p, coef);
      d = std::max({rel(next.u.values(), expect.u), rel(next.q1.values(), expect.q1),
                    rel(next.q2.values(), expect.q2)});
    }
    if (d > worst) {
      worst = d;
      worst_kind = to_string(kind);
    }
  }
  detail = "max relative step difference " + std::to_string(worst) + " (" + worst_kind + ")";
  return worst <= 1e-11;
}

bool splitting_beyond_cfl(std::string& detail) {
  const GridSpec gs{1.0, 1.0, 16, 16};
  const StaggeredGrid g = build_grid(gs);
  const Problem p = manufactured_problem("m1-homogeneous");
  const Coefficients coef = problem_coefficients(p, g);
  const double tau_max = explicit_stability_limit(g, coef);

  int total_violations = 0;
  for (SchemeKind kind : {SchemeKind::LodQ, SchemeKind::LodC}) {
    SchemeConfig cfg;
    cfg.kind = kind;
    cfg.sigma = kind == SchemeKind::LodQ ? 0.25 : 0.5;
    cfg.tau = 10.0 * tau_max;
    RunOptions opt;
    opt.fixed_steps = 500;
    const RunResult run = run_scheme(p, gs, cfg, opt);
    total_violations += run.violations;
  }
  detail = "tau = 10 tau_max = " + std::to_string(10.0 * tau_max) +
           ", violations = " + std::to_string(total_violations);
  return total_violations == 0;
}

bool cost_direction(std::string& detail) {
  // The variable-conductivity problem keeps the trajectory spread over many
  // modes, so the iterative solve works at its genuine iteration count.
  ExperimentConfig cfg;
  cfg.command = Command::Bench;
  cfg.grid = {1.0, 1.0, 64, 64};
  cfg.problem_id = "m2";
  cfg.T = 1.0;
  cfg.scheme.sigma = 0.25;
  cfg.scheme.tau = 0.05;
  cfg.scheme.solver_tol = 1e-10;
  cfg.bench_schemes = {SchemeKind::LodQ, SchemeKind::StaggeredRegularized};
  cfg.bench_steps = 30;
  cfg.out_dir = "acceptance_out/bench";
  std::filesystem::remove_all(cfg.out_dir);
  const RunArtifacts art = run_experiment(cfg);
  if (art.exit_code != 0) {
    detail = "bench command failed";
    return false;
  }

  std::ifstream is(std::filesystem::path(cfg.out_dir) / "bench.csv");
  std::string line;
  std::getline(is, line);  // header
  double per_step[2] = {0, 0};
  long iters[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    std::getline(is, line);
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // scheme
    std::getline(ls, cell, ',');  // steps
    std::getline(ls, cell, ',');  // total
    std::getline(ls, cell, ',');
    per_step[i] = std::stod(cell);
    std::getline(ls, cell, ',');
    iters[i] = std::stol(cell);
  }
  std::ostringstream ss;
  ss << "lod-q " << per_step[0] * 1e3 << " ms/step (cg " << iters[0]
     << "), staggered-regularized " << per_step[1] * 1e3 << " ms/step (cg " << iters[1]
     << ")";
  detail = ss.str();
  return per_step[0] < per_step[1];
}

}  // namespace

int main() {
  apply_thread_cap();
  std::printf("acceptance suite\n");

  criterion(1, "adjointness of gradient and divergence pairs", adjointness);
  criterion(2, "spectral bounds from dense eigendecompositions", spectral);
  criterion(3, "diffusion operator approximation order", operator_order);
  criterion(4, "weighted-scheme energy monitor", theorem1_monitor);
  criterion(5, "system-scheme energy monitor", theorem2_monitor);
  criterion(6, "explicit stability limit sharpness", cfl_sharpness);
  criterion(7, "scheme equivalence residuals", equivalences);
  criterion(8, "second-order convergence ladder", convergence_orders);
  criterion(9, "dense-oracle step equivalence", dense_oracle);
  criterion(10, "splitting schemes far beyond the explicit limit", splitting_beyond_cfl);
  criterion(11, "cost advantage of the factored solve", cost_direction);

  if (failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures;
}

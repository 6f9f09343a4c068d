#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"

using namespace hhc;

namespace {

const double kPi = std::acos(-1.0);

double mode_eigenvalue(const StaggeredGrid& g, int m) {
  auto part = [&](double h, double l) {
    const double s = std::sin(kPi * m * h / (2.0 * l));
    return 4.0 / (h * h) * s * s;
  };
  return part(g.h1, g.spec.l1) + part(g.h2, g.spec.l2);
}

// Single-mode problem whose discrete solution is reproduced exactly by the
// weighted scheme: u = s(x) (1 + t) with the source balanced against the
// grid eigenvalue of s.
Problem exact_reproduction_problem(const StaggeredGrid& g, double nu) {
  Problem p;
  p.name = "exact-affine";
  p.nu = nu;
  p.T = 0.5;
  p.c_fn = [](double, double) { return 1.0; };
  p.k_fn = [](double, double) { return 1.0; };
  const double lam = mode_eigenvalue(g, 1);
  auto s = [](double x1, double x2) { return std::sin(kPi * x1) * std::sin(kPi * x2); };
  p.v0 = s;
  p.v1 = s;
  p.f = [s, lam, nu](double x1, double x2, double t) {
    return s(x1, x2) * (1.0 + lam - nu * lam + lam * t);
  };
  p.df_dt = [s, lam](double x1, double x2, double) { return s(x1, x2) * lam; };
  p.u_exact = [s](double x1, double x2, double t) { return s(x1, x2) * (1.0 + t); };
  return p;
}

}  // namespace

TEST_CASE("energies vanish on the zero state and scale quadratically") {
  const StaggeredGrid g = build_grid({1.0, 1.0, 4, 4});
  const Problem p = manufactured_problem("m1");
  const Coefficients coef = problem_coefficients(p, g);
  SchemeConfig cfg;
  cfg.tau = 0.05;
  cfg.sigma = 0.6;

  std::mt19937 rng(3);
  const ScalarField u = oracle::random_scalar(g, rng);
  const ScalarField up = oracle::random_scalar(g, rng);
  const FluxField q1 = oracle::random_flux(g, 1, rng);
  const FluxField q2 = oracle::random_flux(g, 2, rng);
  const ScalarField zero(g);
  const FluxField zq1(g, 1), zq2(g, 2);

  for (EnergyKind kind :
       {EnergyKind::SWeighted, EnergyKind::SExplicit, EnergyKind::SQ, EnergyKind::SC}) {
    cfg.kind = kind == EnergyKind::SQ ? SchemeKind::LodQ : SchemeKind::ThreeLevelWeighted;
    CHECK(energy_pair(kind, zero, zero, cfg, coef) == 0.0);
    const double base = energy_pair(kind, u, up, cfg, coef);
    const ScalarField u3 = lincomb(3.0, u, 0.0, u);
    const ScalarField up3 = lincomb(3.0, up, 0.0, up);
    CHECK(energy_pair(kind, u3, up3, cfg, coef) == doctest::Approx(9.0 * base).epsilon(1e-12));
  }
  CHECK(energy_vector(zero, zq1, zq2, coef) == 0.0);
  const double gv = energy_vector(u, q1, q2, coef);
  const ScalarField u2 = lincomb(2.0, u, 0.0, u);
  const FluxField q12 = lincomb(2.0, q1, 0.0, q1);
  const FluxField q22 = lincomb(2.0, q2, 0.0, q2);
  CHECK(energy_vector(u2, q12, q22, coef) == doctest::Approx(4.0 * gv).epsilon(1e-12));
}

TEST_CASE("G energy of the unit interior field") {
  const StaggeredGrid g = build_grid({1.0, 1.0, 4, 4});
  const Problem p = manufactured_problem("m1");
  const Coefficients coef = problem_coefficients(p, g);
  const ScalarField ones = sample_scalar(g, [](double, double) { return 1.0; });
  const FluxField zq1(g, 1), zq2(g, 2);
  CHECK(energy_vector(ones, zq1, zq2, coef) == doctest::Approx(0.5625).epsilon(1e-14));
}

TEST_CASE("weighted energy against the dense quadratic form") {
  const StaggeredGrid g = build_grid({1.0, 1.0, 4, 4});
  Problem p = manufactured_problem("m1");
  p.c_fn = [](double x1, double x2) { return 1.0 + 0.2 * x1 + 0.1 * x2; };
  p.k_fn = [](double x1, double) { return 1.0 + 0.5 * x1; };
  const Coefficients coef = problem_coefficients(p, g);
  const oracle::Ops ops = oracle::make_ops(g, coef);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelWeighted;
  cfg.sigma = 0.25;
  cfg.tau = 0.07;

  std::mt19937 rng(7);
  const ScalarField u = oracle::random_scalar(g, rng);
  const ScalarField up = oracle::random_scalar(g, rng);
  const double got = energy_pair(EnergyKind::SWeighted, u, up, cfg, coef);

  // Dense route: h1 h2 [eta^T (nu C + (sigma-1/4) tau^2 D) eta + zeta^T D zeta].
  const int n = ops.ns;
  std::vector<double> eta(n), zeta(n);
  for (int i = 0; i < n; ++i) {
    eta[i] = (u.values()[i] - up.values()[i]) / cfg.tau;
    zeta[i] = 0.5 * (u.values()[i] + up.values()[i]);
  }
  double quad = 0.0;
  std::vector<double> t1 = dense::multiply(ops.C, eta);
  for (double& v : t1) v *= coef.nu;
  const std::vector<double> t2 = dense::multiply(ops.D, eta);
  for (int i = 0; i < n; ++i) t1[i] += (cfg.sigma - 0.25) * cfg.tau * cfg.tau * t2[i];
  for (int i = 0; i < n; ++i) quad += t1[i] * eta[i];
  const std::vector<double> dz = dense::multiply(ops.D, zeta);
  for (int i = 0; i < n; ++i) quad += dz[i] * zeta[i];
  quad *= g.h1 * g.h2;
  CHECK(got == doctest::Approx(quad).epsilon(1e-11));
}

TEST_CASE("positivity of the energies at their thresholds") {
  const StaggeredGrid g = build_grid({1.0, 1.0, 4, 4});
  const Problem p = manufactured_problem("m1");
  const Coefficients coef = problem_coefficients(p, g);
  std::mt19937 rng(11);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelWeighted;
  cfg.sigma = 0.25;
  cfg.tau = 0.4;
  for (int rep = 0; rep < 40; ++rep) {
    const ScalarField u = oracle::random_scalar(g, rng);
    const ScalarField up = oracle::random_scalar(g, rng);
    CHECK(energy_pair(EnergyKind::SWeighted, u, up, cfg, coef) >= -1e-12);
  }

  // Split-operator form: R = nu c E - (tau^2/4) C is positive at
  // nu c0 sigma >= 0.5 and loses definiteness below for large tau.
  const oracle::Ops ops = oracle::make_ops(g, coef);
  auto min_eig_R = [&](double sigma, double tau) {
    const dense::Matrix C = oracle::c_split_dense(ops, coef, sigma, tau);
    dense::Matrix R = dense::add_scaled(ops.C, 0.0, ops.C);
    for (std::size_t i = 0; i < R.a.size(); ++i) R.a[i] = coef.nu * ops.C.a[i];
    R = dense::add_scaled(R, -0.25 * tau * tau, C);
    return dense::sym_eigenvalues(R).front();
  };
  CHECK(min_eig_R(0.5, 1.0) >= -1e-12);
  CHECK(min_eig_R(0.5, 100.0) >= -1e-12);
  CHECK(min_eig_R(0.3, 100.0) < -1e-3);

  // Explicit form: R = nu c E - (tau^2/4) D flips sign across tau_max.
  const double tmax = explicit_stability_limit(g, coef);
  auto min_eig_explicit = [&](double tau) {
    dense::Matrix R = dense::add_scaled(ops.C, 0.0, ops.C);
    for (std::size_t i = 0; i < R.a.size(); ++i) R.a[i] = coef.nu * ops.C.a[i];
    R = dense::add_scaled(R, -0.25 * tau * tau, ops.D);
    return dense::sym_eigenvalues(R).front();
  };
  CHECK(min_eig_explicit(0.9 * tmax) > 0.0);
  CHECK(min_eig_explicit(1.2 * tmax) < 0.0);
}

TEST_CASE("weighted scheme monitor: homogeneous decay without violations") {
  const GridSpec gs{1.0, 1.0, 8, 8};
  const Problem p = manufactured_problem("m1-homogeneous");
  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelWeighted;
  cfg.sigma = 0.5;
  cfg.tau = 0.01;
  cfg.solver_tol = 1e-12;
  RunOptions opt;
  opt.fixed_steps = 200;
  const RunResult run = run_scheme(p, gs, cfg, opt);
  CHECK(run.violations == 0);
  REQUIRE(run.energy.size() == 200);
  // With f = 0 the energy is nonincreasing.
  for (std::size_t i = 1; i < run.energy.size(); ++i)
    CHECK(run.energy[i].value <= run.energy[i - 1].value * (1.0 + 1e-12));
}

TEST_CASE("system scheme monitor satisfies the exponential bound") {
  const GridSpec gs{1.0, 1.0, 8, 8};
  const Problem p = manufactured_problem("m1");
  for (double sigma : {0.5, 1.0}) {
    SchemeConfig cfg;
    cfg.kind = SchemeKind::SystemWeighted;
    cfg.sigma = sigma;
    cfg.tau = 0.005;
    cfg.solver_tol = 1e-12;
    RunOptions opt;
    opt.fixed_steps = 100;
    const RunResult run = run_scheme(p, gs, cfg, opt);
    CHECK(run.violations == 0);
  }
}

TEST_CASE("explicit scheme above the limit violates its monitor quickly") {
  const GridSpec gs{1.0, 1.0, 4, 4};
  const StaggeredGrid g = build_grid(gs);
  const Problem p = top_mode_problem(gs, 1.0, 1.0);
  const Coefficients coef = problem_coefficients(p, g);
  const double tmax = explicit_stability_limit(g, coef);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelExplicit;
  cfg.sigma = 0.0;
  cfg.tau = 1.02 * tmax;
  cfg.second_order_start = false;
  cfg.override_stability = true;
  RunOptions opt;
  opt.fixed_steps = 50;
  const RunResult run = run_scheme(p, gs, cfg, opt);
  CHECK(run.violations >= 1);

  cfg.tau = 0.98 * tmax;
  const RunResult ok = run_scheme(p, gs, cfg, opt);
  CHECK(ok.violations == 0);
}

TEST_CASE("manufactured m1 satisfies its defining equations") {
  const ManufacturedParams prm{0.8, 2.5, 1.0, 1.0, 1.0};
  const Problem p = manufactured_problem("m1", prm);
  const double lam = kPi * kPi * 2.0;
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int rep = 0; rep < 30; ++rep) {
    const double x1 = dist(rng), x2 = dist(rng), t = dist(rng);
    const double s = std::sin(kPi * x1) * std::sin(kPi * x2);
    const double w = prm.omega;
    const double u_t = -w * s * std::sin(w * t);
    const double u_tt = -w * w * s * std::cos(w * t);
    // nu u_tt + u_t + lam u = f + nu f_t
    const double lhs = prm.nu * u_tt + u_t + lam * s * std::cos(w * t);
    const double rhs = p.f(x1, x2, t) + prm.nu * p.df_dt(x1, x2, t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));

    // Flux relaxation: q + nu q_t + k grad u = 0 with numeric q_t.
    const double dt = 1e-6;
    const double q1t =
        (p.q1_exact(x1, x2, t + dt) - p.q1_exact(x1, x2, t - dt)) / (2.0 * dt);
    const double gradu1 = kPi * std::cos(kPi * x1) * std::sin(kPi * x2) * std::cos(w * t);
    CHECK(std::abs(p.q1_exact(x1, x2, t) + prm.nu * q1t + gradu1) < 1e-6);
  }
  // Initial data consistency.
  CHECK(p.u_exact(0.3, 0.7, 0.0) == doctest::Approx(p.v0(0.3, 0.7)).epsilon(1e-14));
  CHECK(p.v1(0.3, 0.7) == 0.0);
  CHECK(p.q1_exact(0.3, 0.7, 0.0) == doctest::Approx(p.g0_1(0.3, 0.7)).epsilon(1e-14));
}

TEST_CASE("manufactured m2 satisfies its defining equations") {
  const ManufacturedParams prm{1.2, 2.0, 1.0, 1.0, 1.0};
  const Problem p = manufactured_problem("m2", prm);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.1, 0.9);
  for (int rep = 0; rep < 20; ++rep) {
    const double x1 = dist(rng), x2 = dist(rng), t = dist(rng);
    const double w = prm.omega;
    const double s = std::sin(kPi * x1) * std::sin(kPi * x2);

    // Temperature equation c u_t + div q = f with div q from second-order
    // finite differences of the exact flux.
    const double h = 1e-4;
    const double divq =
        (p.q1_exact(x1 + h, x2, t) - p.q1_exact(x1 - h, x2, t)) / (2.0 * h) +
        (p.q2_exact(x1, x2 + h, t) - p.q2_exact(x1, x2 - h, t)) / (2.0 * h);
    const double u_t = -w * s * std::sin(w * t);
    CHECK(std::abs(u_t + divq - p.f(x1, x2, t)) < 1e-5);

    // Flux relaxation with numeric q_t.
    const double dt = 1e-6;
    const double q2t =
        (p.q2_exact(x1, x2, t + dt) - p.q2_exact(x1, x2, t - dt)) / (2.0 * dt);
    const double k = 1.0 + 0.5 * x1;
    const double gradu2 = kPi * std::sin(kPi * x1) * std::cos(kPi * x2) * std::cos(w * t);
    CHECK(std::abs(p.q2_exact(x1, x2, t) + prm.nu * q2t + k * gradu2) < 1e-6);
  }
}

TEST_CASE("manufactured m2 is reproduced by a fine run") {
  // Validates the derived source by solving and comparing to the stated
  // exact solution at two resolutions.
  const Problem p = manufactured_problem("m2");
  SchemeConfig cfg;
  cfg.kind = SchemeKind::LodQ;
  cfg.sigma = 0.5;
  cfg.tau = p.T / 128.0;
  RunOptions opt;
  opt.monitor = false;

  auto error_at = [&](int n, double tau) {
    SchemeConfig c2 = cfg;
    c2.tau = tau;
    const GridSpec gs{1.0, 1.0, n, n};
    const RunResult run = run_scheme(p, gs, c2, opt);
    const StaggeredGrid g = build_grid(gs);
    const ScalarField exact =
        sample_scalar(g, [&](double x1, double x2) { return p.u_exact(x1, x2, p.T); });
    return norm_inf(lincomb(1.0, run.u_final, -1.0, exact));
  };
  const double e32 = error_at(32, p.T / 128.0);
  const double e64 = error_at(64, p.T / 256.0);
  CHECK(e32 < 2e-3);
  CHECK(e64 < e32 / 3.0);
}

TEST_CASE("unknown manufactured id is rejected") {
  CHECK_THROWS_AS(manufactured_problem("m9"), std::invalid_argument);
}

TEST_CASE("convergence study reproduces an exactly representable solution") {
  const GridSpec gs{1.0, 1.0, 6, 6};
  const StaggeredGrid g = build_grid(gs);
  const Problem p = exact_reproduction_problem(g, 0.9);
  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelWeighted;
  cfg.sigma = 0.5;
  cfg.solver_tol = 1e-13;
  const std::vector<LadderRung> ladder{{gs, 0.05}, {gs, 0.025}};
  const auto rows = convergence_study(p, cfg, ladder);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].err_max < 1e-9);
  CHECK(rows[1].err_max < 1e-9);
}

TEST_CASE("convergence study on m1 shows second order") {
  ManufacturedParams prm;
  prm.omega = 5.0;  // puts the ladder in the asymptotic regime early
  const Problem p = manufactured_problem("m1", prm);
  SchemeConfig cfg;
  cfg.kind = SchemeKind::ThreeLevelWeighted;
  cfg.sigma = 0.5;
  cfg.solver_tol = 1e-12;
  std::vector<LadderRung> ladder;
  double tau = p.T / 8.0;
  for (int n = 8; n <= 32; n *= 2) {
    ladder.push_back({GridSpec{1.0, 1.0, n, n}, tau});
    tau *= 0.5;
  }
  const auto rows = convergence_study(p, cfg, ladder);
  REQUIRE(rows.size() == 3);
  CHECK(std::isnan(rows[0].order_l2));
  CHECK(rows[2].order_l2 > 1.8);
  CHECK(rows[2].order_l2 < 2.2);
}

TEST_CASE("temporal study against a fine-step reference shows first order at sigma 1") {
  const Problem p = manufactured_problem("m1");
  const GridSpec gs{1.0, 1.0, 16, 16};
  SchemeConfig ref_cfg;
  ref_cfg.kind = SchemeKind::SystemWeighted;
  ref_cfg.sigma = 0.5;
  ref_cfg.tau = p.T / 640.0;
  RunOptions opt;
  opt.monitor = false;
  const RunResult ref_run = run_scheme(p, gs, ref_cfg, opt);
  const ScalarField ref_final = ref_run.u_final;

  ReferenceAtT ref = [&](const StaggeredGrid& g) {
    REQUIRE(g == ref_final.grid());
    return ref_final;
  };
  SchemeConfig cfg;
  cfg.kind = SchemeKind::SystemWeighted;
  cfg.sigma = 1.0;
  const std::vector<LadderRung> ladder{{gs, p.T / 10.0}, {gs, p.T / 20.0}, {gs, p.T / 40.0}};
  const auto rows = convergence_study(p, cfg, ladder, &ref);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].order_l2 > 0.7);
  CHECK(rows[2].order_l2 < 1.3);
}

TEST_CASE("start order controls the temporal convergence order") {
  ManufacturedParams prm;
  prm.omega = 5.0;
  const Problem p = manufactured_problem("m1", prm);
  const GridSpec gs{1.0, 1.0, 16, 16};
  SchemeConfig rc;
  rc.kind = SchemeKind::ThreeLevelWeighted;
  rc.sigma = 0.5;
  rc.tau = p.T / 1280.0;
  rc.solver_tol = 1e-12;
  RunOptions opt;
  opt.monitor = false;
  const ScalarField ref_final = run_scheme(p, gs, rc, opt).u_final;
  const ReferenceAtT ref = [&](const StaggeredGrid&) { return ref_final; };

  for (SchemeKind kind : {SchemeKind::ThreeLevelWeighted, SchemeKind::StaggeredRegularized}) {
    CAPTURE(to_string(kind));
    const std::vector<LadderRung> ladder{
        {gs, p.T / 10}, {gs, p.T / 20}, {gs, p.T / 40}, {gs, p.T / 80}};
    SchemeConfig cfg;
    cfg.kind = kind;
    cfg.sigma = 0.5;
    cfg.solver_tol = 1e-12;

    cfg.second_order_start = true;
    const auto good = convergence_study(p, cfg, ladder, &ref);
    CHECK(good.back().order_l2 > 1.8);
    CHECK(good.back().order_l2 < 2.2);

    cfg.second_order_start = false;
    const auto degraded = convergence_study(p, cfg, ladder, &ref);
    CHECK(degraded.back().order_l2 < 1.5);
    CHECK(degraded.back().err_l2 > good.back().err_l2);
  }
}

TEST_CASE("equivalence residual of the zero trajectory is zero") {
  const StaggeredGrid g = build_grid({1.0, 1.0, 4, 4});
  Problem p = manufactured_problem("m1-homogeneous");
  p.v0 = [](double, double) { return 0.0; };
  const Coefficients coef = problem_coefficients(p, g);
  SchemeConfig cfg;
  cfg.kind = SchemeKind::StaggeredExplicit;
  cfg.tau = 0.02;
  const std::vector<ScalarField> levels(5, ScalarField(g));
  CHECK(equivalence_residual(EquivalenceKind::ExplicitThreeLevel, levels, p, cfg, coef) ==
        0.0);
}

TEST_CASE("monitors stay clean across the catalog at sanctioned parameters") {
  struct Case {
    const char* id;
    SchemeKind kind;
    double sigma;
  };
  const Case cases[] = {
      {"m1", SchemeKind::LodQ, 0.5},
      {"m1", SchemeKind::LodC, 0.6},
      {"m2", SchemeKind::StaggeredRegularized, 0.5},
      {"m1", SchemeKind::StaggeredAdditiveQ, 0.5},
      {"m3", SchemeKind::SplitComponentwiseP3, 0.5},
  };
  for (const Case& c : cases) {
    CAPTURE(c.id);
    CAPTURE(to_string(c.kind));
    ManufacturedParams prm;
    if (std::string(c.id) == "m3") prm.nu = 0.5;
    const Problem p = manufactured_problem(c.id, prm);
    SchemeConfig cfg;
    cfg.kind = c.kind;
    cfg.sigma = c.sigma;
    cfg.tau = 0.005;
    cfg.solver_tol = 1e-12;
    RunOptions opt;
    opt.fixed_steps = 200;
    const RunResult run = run_scheme(p, {1.0, 1.0, 8, 8}, cfg, opt);
    CHECK(run.violations == 0);
  }
}

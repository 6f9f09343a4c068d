#include "hhc/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hhc/snapshot.hpp"

namespace hhc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter {
  std::ofstream os;
  explicit CsvWriter(const fs::path& path) : os(path) {
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  }
  void header(const std::string& h) { os << h << '\n'; }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((os << (first ? "" : ",") << cell(cells), first = false), ...);
    os << '\n';
  }
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

json scheme_json(const SchemeConfig& s, double tau_effective, int steps) {
  json j;
  j["kind"] = to_string(s.kind);
  j["sigma"] = s.sigma;
  j["tau"] = s.tau;
  j["tau_effective"] = tau_effective;
  j["steps"] = steps;
  j["p"] = s.p;
  j["second_order_start"] = s.second_order_start;
  j["override_stability"] = s.override_stability;
  j["k_in_reduced_operator"] = s.k_in_reduced_operator;
  j["source_split"] = s.source_split == SourceSplit::Even ? "even" : "first";
  j["solver_tol"] = s.solver_tol;
  return j;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  RunArtifacts art;
  art.out_dir = cfg.out_dir;
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);

  json manifest;
  manifest["command"] = to_string(cfg.command);
  manifest["timestamp"] = timestamp_now();
  manifest["grid"] = {{"n1", cfg.grid.n1},
                      {"n2", cfg.grid.n2},
                      {"l1", cfg.grid.l1},
                      {"l2", cfg.grid.l2}};
  manifest["problem"] = {{"id", cfg.problem_id},
                         {"nu", cfg.nu},
                         {"omega", cfg.omega},
                         {"T", cfg.T}};

  const Problem problem = make_problem(cfg);
  const StaggeredGrid grid = build_grid(cfg.grid);
  const Coefficients coef = problem_coefficients(problem, grid);

  art.warnings = stability_prechecks(cfg.scheme, grid, coef, problem.T);

  auto finish = [&](int code) {
    manifest["stability_warnings"] = art.warnings;
    manifest["exit_code"] = code;
    if (!art.failure.empty()) manifest["failure"] = art.failure;
    manifest["artifacts"] = art.files;
    std::ofstream ms(out / "manifest.json");
    ms << manifest.dump(2) << '\n';
    art.files.push_back("manifest.json");
    art.exit_code = code;
    return art;
  };

  try {
    switch (cfg.command) {
      case Command::Run: {
        RunOptions opt;
        opt.monitor = true;
        const RunResult run = run_scheme(problem, cfg.grid, cfg.scheme, opt);
        manifest["scheme"] = scheme_json(cfg.scheme, run.tau, run.steps);
        manifest["energy_kind"] = to_string(run.energy_kind);
        manifest["violations"] = run.violations;
        manifest["cg_iterations"] = run.stats.cg_iterations;
        manifest["line_sweeps"] = run.stats.line_sweeps;
        manifest["seconds"] = run.seconds;

        CsvWriter csv(out / "energy.csv");
        csv.header("n,t,energy_kind,value,bound,slack,violated");
        const std::string ek = to_string(run.energy_kind);
        for (const EnergyRecord& r : run.energy)
          csv.row(r.n, r.t, ek, r.value, r.bound_rhs, r.slack, r.violated);
        art.files.push_back("energy.csv");

        write_snapshot_file((out / "final.field").string(), run.u_final);
        art.files.push_back("final.field");
        break;
      }

      case Command::Converge: {
        std::vector<LadderRung> ladder;
        GridSpec gs = cfg.grid;
        double tau = cfg.scheme.tau;
        for (int r = 0; r < cfg.converge_rungs; ++r) {
          ladder.push_back({gs, tau});
          tau *= 0.5;
          if (!cfg.converge_time_only) {
            gs.n1 *= 2;
            gs.n2 *= 2;
          }
        }
        const auto rows = convergence_study(problem, cfg.scheme, ladder);
        manifest["scheme"] = scheme_json(cfg.scheme, cfg.scheme.tau, 0);
        manifest["rungs"] = cfg.converge_rungs;

        CsvWriter csv(out / "converge.csv");
        csv.header("h1,h2,tau,err_max,err_l2,order_max,order_l2");
        for (const ConvergenceRow& r : rows)
          csv.row(r.h1, r.h2, r.tau, r.err_max, r.err_l2, r.order_max, r.order_l2);
        art.files.push_back("converge.csv");
        break;
      }

      case Command::StabilityScan: {
        const double tau_max = explicit_stability_limit(grid, coef);
        manifest["tau_max"] = tau_max;
        CsvWriter csv(out / "scan.csv");
        csv.header("ratio,tau,growth_factor,violations");
        for (double ratio : cfg.scan_ratios) {
          SchemeConfig sc = cfg.scheme;
          sc.tau = ratio * tau_max;
          sc.override_stability = true;  // the scan is allowed to cross the limit
          RunOptions opt;
          opt.monitor = true;
          opt.record_levels = true;
          opt.fixed_steps = cfg.scan_steps;
          const RunResult run = run_scheme(problem, cfg.grid, sc, opt);
          csv.row(ratio, sc.tau, growth_factor(run.levels), run.violations);
          if (ratio > 1.0)
            art.warnings.push_back("scan point tau = " + std::to_string(sc.tau) +
                                   " exceeds tau_max = " + std::to_string(tau_max));
        }
        art.files.push_back("scan.csv");
        manifest["scheme"] = scheme_json(cfg.scheme, cfg.scheme.tau, cfg.scan_steps);
        break;
      }

      case Command::Equivalence: {
        CsvWriter csv(out / "equivalence.csv");
        csv.header("check,scheme,steps,max_residual,threshold,pass");
        const int steps = cfg.equivalence_steps;
        const double tau = cfg.scheme.tau;

        auto record = [&](const std::string& check, const std::string& scheme, double value,
                          double threshold) {
          csv.row(check, scheme, steps, value, threshold, value <= threshold);
          manifest["equivalence"][check] = value;
        };

        {
          SchemeConfig sc = cfg.scheme;
          sc.kind = SchemeKind::StaggeredExplicit;
          sc.tau = tau;
          sc.override_stability = cfg.scheme.override_stability;
          RunOptions opt;
          opt.monitor = false;
          opt.record_levels = true;
          opt.fixed_steps = steps;
          const RunResult run = run_scheme(problem, cfg.grid, sc, opt);
          record("explicit-threelevel", to_string(sc.kind),
                 equivalence_residual(EquivalenceKind::ExplicitThreeLevel, run.levels,
                                      problem, sc, coef),
                 1e-11);
        }
        {
          SchemeConfig sc = cfg.scheme;
          sc.kind = SchemeKind::StaggeredRegularized;
          sc.tau = tau;
          RunOptions opt;
          opt.monitor = false;
          opt.record_levels = true;
          opt.fixed_steps = steps;
          const RunResult run = run_scheme(problem, cfg.grid, sc, opt);
          record("regularized-threelevel", to_string(sc.kind),
                 equivalence_residual(EquivalenceKind::RegularizedThreeLevel, run.levels,
                                      problem, sc, coef),
                 1e-11);
        }
        record("flux-perturbed-vs-split-c", "staggered-flux-perturbed/lod-c",
               split_correspondence_max_diff(problem, cfg.grid, cfg.scheme.sigma, tau, steps),
               1e-10);
        art.files.push_back("equivalence.csv");
        break;
      }

      case Command::Bench: {
        std::vector<SchemeKind> kinds = cfg.bench_schemes;
        if (kinds.empty()) kinds = public_scheme_kinds();
        CsvWriter csv(out / "bench.csv");
        csv.header(
            "scheme,steps,total_seconds,per_step_seconds,cg_iterations,line_sweeps");
        for (SchemeKind kind : kinds) {
          SchemeConfig sc = cfg.scheme;
          sc.kind = kind;
          sc.override_stability = true;
          RunOptions opt;
          opt.monitor = false;
          opt.fixed_steps = cfg.bench_steps;
          const RunResult run = run_scheme(problem, cfg.grid, sc, opt);
          csv.row(to_string(kind), run.steps, run.seconds, run.seconds / run.steps,
                  run.stats.cg_iterations, run.stats.line_sweeps);
        }
        art.files.push_back("bench.csv");
        manifest["bench_steps"] = cfg.bench_steps;
        break;
      }
    }
  } catch (const std::exception& e) {
    art.failure = e.what();
    return finish(1);
  }

  const bool stability_failed =
      !art.warnings.empty() && !cfg.scheme.override_stability;
  return finish(stability_failed ? 1 : 0);
}

}  // namespace hhc

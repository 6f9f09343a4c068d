#include "hhc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hhc {

std::string to_string(Command c) {
  switch (c) {
    case Command::Run: return "run";
    case Command::Converge: return "converge";
    case Command::StabilityScan: return "stability-scan";
    case Command::Equivalence: return "equivalence";
    case Command::Bench: return "bench";
  }
  throw std::logic_error("to_string: unknown command");
}

std::optional<Command> parse_command(const std::string& name) {
  if (name == "run") return Command::Run;
  if (name == "converge") return Command::Converge;
  if (name == "stability-scan") return Command::StabilityScan;
  if (name == "equivalence") return Command::Equivalence;
  if (name == "bench") return Command::Bench;
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parser {
  ExperimentConfig cfg;
  std::vector<Diagnostic> errors;
  std::string section;
  int line = 0;

  void error(const std::string& msg) { errors.push_back({line, section, msg}); }

  bool to_double(const std::string& v, double& out) {
    try {
      std::size_t pos = 0;
      out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      error("expected a number, got '" + v + "'");
      return false;
    }
  }

  bool to_int(const std::string& v, int& out) {
    try {
      std::size_t pos = 0;
      out = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      error("expected an integer, got '" + v + "'");
      return false;
    }
  }

  bool to_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") {
      out = true;
      return true;
    }
    if (v == "false" || v == "0" || v == "no") {
      out = false;
      return true;
    }
    error("expected true/false, got '" + v + "'");
    return false;
  }

  void check_positive(double v, const std::string& key) {
    if (!(v > 0.0)) error(key + " must be positive (got " + std::to_string(v) + ")");
  }

  void handle(const std::string& key, const std::string& value) {
    if (section.empty()) {
      if (key == "command") {
        auto c = parse_command(value);
        if (!c) error("unknown command '" + value + "'");
        else cfg.command = *c;
      } else {
        error("unknown key '" + key + "' outside any section");
      }
      return;
    }
    if (section == "grid") {
      if (key == "n1") to_int(value, cfg.grid.n1);
      else if (key == "n2") to_int(value, cfg.grid.n2);
      else if (key == "l1") to_double(value, cfg.grid.l1);
      else if (key == "l2") to_double(value, cfg.grid.l2);
      else error("unknown key '" + key + "' in [grid]");
      return;
    }
    if (section == "problem") {
      if (key == "id") cfg.problem_id = value;
      else if (key == "omega") to_double(value, cfg.omega);
      else if (key == "T" || key == "t") to_double(value, cfg.T);
      else error("unknown key '" + key + "' in [problem]");
      return;
    }
    if (section == "coefficients") {
      if (key == "nu") {
        if (to_double(value, cfg.nu) && cfg.nu < 0.0) error("nu must be nonnegative");
      } else {
        error("unknown key '" + key + "' in [coefficients]");
      }
      return;
    }
    if (section == "scheme") {
      if (key == "kind") {
        auto k = parse_scheme_kind(value);
        if (!k) error("unknown scheme kind '" + value + "'");
        else cfg.scheme.kind = *k;
      } else if (key == "sigma") {
        double s;
        if (to_double(value, s)) {
          if (s < 0.0) error("sigma must be nonnegative (got " + value + ")");
          else cfg.scheme.sigma = s;
        }
      } else if (key == "tau") {
        double t;
        if (to_double(value, t)) {
          check_positive(t, "tau");
          cfg.scheme.tau = t;
          cfg.tau_given = true;
        }
      } else if (key == "p") {
        int p;
        if (to_int(value, p)) {
          if (p != 2 && p != 3) error("p must be 2 or 3 (got " + value + ")");
          else cfg.scheme.p = p;
        }
      } else if (key == "second_order_start") {
        to_bool(value, cfg.scheme.second_order_start);
      } else if (key == "override_stability") {
        to_bool(value, cfg.scheme.override_stability);
      } else if (key == "k_in_reduced_operator") {
        to_bool(value, cfg.scheme.k_in_reduced_operator);
      } else if (key == "source_split") {
        if (value == "first") cfg.scheme.source_split = SourceSplit::FirstSubstep;
        else if (value == "even") cfg.scheme.source_split = SourceSplit::Even;
        else error("source_split must be 'first' or 'even'");
      } else {
        error("unknown key '" + key + "' in [scheme]");
      }
      return;
    }
    if (section == "solver") {
      if (key == "tol") {
        double t;
        if (to_double(value, t)) {
          check_positive(t, "tol");
          cfg.scheme.solver_tol = t;
        }
      } else if (key == "max_iter") {
        to_int(value, cfg.scheme.solver_max_iter);
      } else {
        error("unknown key '" + key + "' in [solver]");
      }
      return;
    }
    if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else error("unknown key '" + key + "' in [output]");
      return;
    }
    if (section == "converge") {
      if (key == "rungs") {
        if (to_int(value, cfg.converge_rungs) && cfg.converge_rungs < 2)
          error("rungs must be at least 2");
      } else if (key == "mode") {
        if (value == "spacetime") cfg.converge_time_only = false;
        else if (value == "time") cfg.converge_time_only = true;
        else error("mode must be 'spacetime' or 'time'");
      } else {
        error("unknown key '" + key + "' in [converge]");
      }
      return;
    }
    if (section == "scan") {
      if (key == "ratios") {
        cfg.scan_ratios.clear();
        std::istringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          double r;
          if (to_double(trim(item), r)) {
            if (!(r > 0.0)) error("scan ratios must be positive");
            else cfg.scan_ratios.push_back(r);
          }
        }
        if (cfg.scan_ratios.empty()) error("ratios list is empty");
      } else if (key == "steps") {
        if (to_int(value, cfg.scan_steps) && cfg.scan_steps < 3)
          error("scan steps must be at least 3");
      } else {
        error("unknown key '" + key + "' in [scan]");
      }
      return;
    }
    if (section == "equivalence") {
      if (key == "steps") {
        if (to_int(value, cfg.equivalence_steps) && cfg.equivalence_steps < 3)
          error("equivalence steps must be at least 3");
      } else {
        error("unknown key '" + key + "' in [equivalence]");
      }
      return;
    }
    if (section == "bench") {
      if (key == "schemes") {
        cfg.bench_schemes.clear();
        std::istringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          auto k = parse_scheme_kind(trim(item));
          if (!k) error("unknown scheme kind '" + trim(item) + "' in bench list");
          else cfg.bench_schemes.push_back(*k);
        }
      } else if (key == "steps") {
        if (to_int(value, cfg.bench_steps) && cfg.bench_steps < 1)
          error("bench steps must be at least 1");
      } else {
        error("unknown key '" + key + "' in [bench]");
      }
      return;
    }
    error("unknown section [" + section + "]");
  }
};

}  // namespace

ParseResult parse_config(const std::string& text) {
  Parser p;
  std::istringstream is(text);
  std::string raw;
  while (std::getline(is, raw)) {
    ++p.line;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.error("malformed section header '" + raw + "'");
        continue;
      }
      p.section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.error("expected 'key = value', got '" + raw + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      p.error("expected 'key = value', got '" + raw + "'");
      continue;
    }
    p.handle(key, value);
  }

  ParseResult result;

  // Cross-field validation.
  ExperimentConfig& cfg = p.cfg;
  p.section = "grid";
  p.line = 0;
  if (cfg.grid.n1 < 2 || cfg.grid.n2 < 2)
    p.error("grid needs at least 2 cells per direction");
  if (!(cfg.grid.l1 > 0.0) || !(cfg.grid.l2 > 0.0)) p.error("side lengths must be positive");
  p.section = "problem";
  if (!(cfg.T > 0.0)) p.error("T must be positive");
  bool known_problem = cfg.problem_id == "top-mode";
  for (const std::string& id : manufactured_ids()) known_problem |= id == cfg.problem_id;
  if (!known_problem) p.error("unknown problem id '" + cfg.problem_id + "'");
  if (!cfg.tau_given) cfg.scheme.tau = cfg.T / 100.0;

  // Keep the componentwise kind and p consistent.
  if (cfg.scheme.kind == SchemeKind::SplitComponentwiseP2) cfg.scheme.p = 2;
  if (cfg.scheme.kind == SchemeKind::SplitComponentwiseP3) cfg.scheme.p = 3;

  if (!p.errors.empty()) {
    result.errors = std::move(p.errors);
    return result;
  }

  // Stability prechecks become warnings on the parsed config.
  try {
    const StaggeredGrid g = build_grid(cfg.grid);
    const Problem prob = make_problem(cfg);
    const Coefficients coef = problem_coefficients(prob, g);
    result.warnings = stability_prechecks(cfg.scheme, g, coef, prob.T);
  } catch (const std::exception& e) {
    result.errors.push_back({0, "", e.what()});
    return result;
  }

  result.config = std::move(cfg);
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    ParseResult r;
    r.errors.push_back({0, "", "cannot open config file: " + path});
    return r;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

Problem make_problem(const ExperimentConfig& cfg) {
  if (cfg.problem_id == "top-mode") return top_mode_problem(cfg.grid, cfg.nu, cfg.T);
  ManufacturedParams prm;
  prm.nu = cfg.nu;
  prm.omega = cfg.omega;
  prm.T = cfg.T;
  prm.l1 = cfg.grid.l1;
  prm.l2 = cfg.grid.l2;
  return manufactured_problem(cfg.problem_id, prm);
}

}  // namespace hhc

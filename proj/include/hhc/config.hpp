#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hhc/diagnostics.hpp"

namespace hhc {

enum class Command { Run, Converge, StabilityScan, Equivalence, Bench };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct Diagnostic {
  int line = 0;
  std::string section;
  std::string message;
};

// Batch experiment description. See docs/config.md for the file schema.
struct ExperimentConfig {
  Command command = Command::Run;

  GridSpec grid{1.0, 1.0, 16, 16};

  std::string problem_id = "m1";
  double nu = 1.0;
  double omega = 2.0;
  double T = 1.0;

  SchemeConfig scheme;  // sigma = 0.5, solver_tol = 1e-10 by default

  std::string out_dir = "out";

  int converge_rungs = 4;
  bool converge_time_only = false;

  std::vector<double> scan_ratios{0.9, 0.98, 1.02, 1.1};
  int scan_steps = 50;

  int equivalence_steps = 40;

  std::vector<SchemeKind> bench_schemes;  // empty selects all public kinds
  int bench_steps = 20;

  bool tau_given = false;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> errors;
  std::vector<std::string> warnings;
};

// Parses the key-value experiment format. Returns either a validated config
// (possibly with stability warnings) or the list of diagnostics, each
// carrying its line and section.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

// Materializes the catalog problem the config names.
Problem make_problem(const ExperimentConfig& cfg);

}  // namespace hhc

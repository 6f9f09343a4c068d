#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hhc/parallel.hpp"
#include "hhc/runner.hpp"

namespace {

int execute(hhc::Command command, const std::string& config_path, const std::string& out_dir,
            bool override_stability) {
  hhc::ParseResult parsed = hhc::parse_config_file(config_path);
  if (!parsed.config) {
    for (const hhc::Diagnostic& d : parsed.errors) {
      std::cerr << config_path << ":" << d.line;
      if (!d.section.empty()) std::cerr << " [" << d.section << "]";
      std::cerr << " error: " << d.message << '\n';
    }
    return 2;
  }
  hhc::ExperimentConfig cfg = *parsed.config;
  cfg.command = command;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (override_stability) cfg.scheme.override_stability = true;

  for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << '\n';

  const hhc::RunArtifacts art = hhc::run_experiment(cfg);
  if (!art.failure.empty()) std::cerr << "scheme failure: " << art.failure << '\n';
  for (const std::string& w : art.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << art.out_dir << "/{";
  for (std::size_t i = 0; i < art.files.size(); ++i)
    std::cout << (i ? "," : "") << art.files[i];
  std::cout << "}\n";
  return art.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  hhc::apply_thread_cap();

  CLI::App app{"hhc - hyperbolic heat conduction experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool override_stability = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    cmd->add_flag("--override-stability", override_stability,
                  "run past stability preconditions without failing the exit status");
  };

  add_common(app.add_subcommand("run", "time-step a scheme and monitor its energy bound"));
  add_common(app.add_subcommand("converge", "refinement study against the exact solution"));
  add_common(app.add_subcommand("stability-scan",
                                "growth factors across the explicit stability limit"));
  add_common(app.add_subcommand("equivalence",
                                "residuals of the scheme-equivalence identities"));
  add_common(app.add_subcommand("bench", "per-step cost comparison across schemes"));

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  const auto command = hhc::parse_command(sub);
  if (!command) {
    std::cerr << "unknown command " << sub << '\n';
    return 2;
  }
  try {
    return execute(*command, config_path, out_dir, override_stability);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

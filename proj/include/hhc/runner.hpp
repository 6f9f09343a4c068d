#pragma once

#include <string>
#include <vector>

#include "hhc/config.hpp"

namespace hhc {

struct RunArtifacts {
  int exit_code = 0;
  std::string out_dir;
  std::vector<std::string> files;     // artifacts written, relative to out_dir
  std::vector<std::string> warnings;  // stability precondition notes
  std::string failure;                // nonempty when the scheme failed
};

// Executes the configured command and writes its artifacts (CSV files, the
// final-field snapshot, and a manifest with all resolved parameters) into
// the output directory. The exit code is nonzero iff the scheme failed or a
// stability precondition was violated without the override flag.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

}  // namespace hhc

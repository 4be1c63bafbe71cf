#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ssep/config.hpp"

namespace ssep {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidConfig = 2,
  kExitCapExceeded = 3,
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand, writing CSVs and the resolved config into
/// cfg.output_dir and a human-readable report to `report`. Returns 0 when
/// every asserted check passes and 1 otherwise; configuration problems and
/// cap violations propagate as exceptions (see exit_code_for).
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& report);

/// Maps an exception escaping run() or load_config() to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace ssep

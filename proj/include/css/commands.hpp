#pragma once

#include <memory>
#include <string>

#include "css/config.hpp"
#include "css/functional.hpp"

namespace css {

/// Exit-code contract shared by the CLI and the C API.
enum ExitCode : int {
  exit_ok = 0,
  exit_verification_failed = 1,
  exit_config_error = 2,
  exit_degenerate = 3,
  exit_not_converged = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

struct CommandResult {
  int exit_code = exit_ok;
  std::string report;  // JSON document
};

CommandResult run_verify(const RunConfig& config);
CommandResult run_spectrum(const RunConfig& config);
CommandResult run_solve(const RunConfig& config);
CommandResult run_landscape(const RunConfig& config);

/// Potential with a custom table loaded from disk when configured.
PotentialSpec resolve_potential(const RunConfig& config);

/// Grid, operator, spectral split and functional for one configuration.
struct Problem {
  Grid grid;
  std::shared_ptr<const SpectralSplit> split;
  std::shared_ptr<const Functional> functional;
};
Problem build_problem(const RunConfig& config);

}  // namespace css

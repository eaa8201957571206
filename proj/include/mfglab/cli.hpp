#pragma once

// Command-line front end. `run` is the whole program minus process exit so
// tests can drive it in-process.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfglab/cache.hpp"

namespace mfglab::cli {

enum ExitCode : int { kSuccess = 0, kError = 1, kVerdictFailure = 2 };

struct RunResult {
  int exit_code = kError;
  cache::CacheStats cache;
  /// MFG plus linearized solves performed during this run.
  std::uint64_t solver_calls = 0;
};

/// args excludes the program name.
RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> subcommands();

}  // namespace mfglab::cli

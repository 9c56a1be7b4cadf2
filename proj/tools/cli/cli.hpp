#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jitterkit::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kReplayMismatch = 1,  // also unexpected internal failures
  kConfigError = 2,     // bad flags, unreadable or malformed files, domain violations
  kSolverError = 3,     // no phase-matched solution
  kFitError = 4,        // flat histogram, degenerate or non-converged fit
};

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jitterkit::cli

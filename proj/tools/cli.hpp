#pragma once

#include <iosfwd>

namespace hawkes_lab::cli {

/// Exit codes of the hawkes-lab tool.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kAssumptionFailure = 2,
  kRuntimeError = 3,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hawkes_lab::cli

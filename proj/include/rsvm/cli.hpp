#pragma once

#include <ostream>

namespace rsvm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kSolveFailure = 1,  ///< solve did not certify, or arithmetic broke down
  kUsageError = 2,    ///< bad flags, unreadable or malformed input
};

/// Entry point for the `rsvm` tool: train, screen, bench and gen-data.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsvm::cli

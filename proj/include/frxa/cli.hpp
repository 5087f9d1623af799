#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace frxa::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kUsage = 2,  // bad flags, missing or malformed input
  kCheckpointMismatch = 3,
  kDivergence = 4,
};

/// Runs one command line (without the program name). Summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace frxa::cli

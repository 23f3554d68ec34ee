#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace laser_tools::cli {

/// Process exit status. The numeric values are a stable contract.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kIoError = 3,
  kFrameError = 4,
  kNoBatches = 5,
};

/// Runs one invocation: `args` excludes the program name. Records go to `out`, diagnostics
/// to `err`; `in` feeds --stream mode.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace laser_tools::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace projwass::cli {

/// Process exit codes. `test` additionally returns 0 for ACCEPT_H0 and 1 for
/// REJECT_H0.
enum ExitCode : int {
  kOk = 0,
  kRejected = 1,
  kUsage = 2,
  kDimensionMismatch = 3,
  kDiverged = 4,
  kFailure = 5,
};

/// Runs one command line (without the program name). Human-readable output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace projwass::cli

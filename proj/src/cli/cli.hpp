#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exactls::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
  kExitVerification = 5,
};

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`; diagnostics, and the wall time in json mode, go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exactls::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qkd3::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitInsufficientData = 4,
};

/// Parses `args` (without the program name), runs the subcommand and prints
/// its report to `out`. Errors go to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qkd3::cli

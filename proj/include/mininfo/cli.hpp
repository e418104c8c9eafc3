#pragma once

#include <iosfwd>

namespace mininfo {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

/// Entry point of the `mininfo` tool; machine output goes to `out`, logs
/// and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mininfo

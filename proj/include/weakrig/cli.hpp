#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weakrig {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitNotRigid = 2,
  kExitTimeout = 3,
  kExitIncorrectEquilibrium = 4,
};

/// Runs `weakrig <args...>` (args excludes the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weakrig

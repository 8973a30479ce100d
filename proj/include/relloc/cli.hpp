#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relloc {

enum ExitCode : int {
  kExitNoViolation = 0,
  kExitViolation = 1,
  kExitInputError = 2,
  kExitInternalError = 3,
};

/// Entry point for `relloc <parse|check|localize|instances> ...`.
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relloc

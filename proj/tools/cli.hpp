#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blstmseg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitBadModel = 3,
  kExitMismatch = 4,
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name, e.g. {"segment", "--model", "m.bin"}.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace blstmseg::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridgram {

enum ExitStatus : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitInternal = 4,
};

// Entry point of the gridgram command-line tool; args[0] is the program name.
// Results go to `out`, progress and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridgram

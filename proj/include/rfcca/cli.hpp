#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rfcca {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

// Entry point of the rfcca tool. `args` excludes the program name.
// Results go to --out or `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfcca

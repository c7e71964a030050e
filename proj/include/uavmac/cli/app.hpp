#ifndef UAVMAC_CLI_APP_HPP
#define UAVMAC_CLI_APP_HPP

#include <ostream>
#include <string>
#include <vector>

namespace uavmac::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNoConvergence = 3,
  kExitCompare = 4,
};

/// Whole command-line front end. `args` excludes the program name. Errors
/// are reported as one "E_<CODE>: message" line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavmac::cli

#endif  // UAVMAC_CLI_APP_HPP

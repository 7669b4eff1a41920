#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace physarum::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kValidation = 3,
  kNumerical = 4,
  kVerification = 5,
};

/// args excludes the program name. Results go to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace physarum::cli

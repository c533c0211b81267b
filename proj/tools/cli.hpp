#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace powdist::cli {

enum ExitCode : int {
  kOk = 0,
  kCertifiedFailure = 1,
  kPrecisionOrFeasibility = 2,
  kUsage = 3,
};

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace powdist::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairround::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,  // I/O, schema or malformed instance
  kInfeasible = 2,
  kBudget = 3,      // condition violated or a result missed its bounds
  kScale = 4,       // an enumeration guard tripped
};

/// Runs the command line `args` (program name first). Results go to `out`
/// unless redirected with -o; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairround::cli

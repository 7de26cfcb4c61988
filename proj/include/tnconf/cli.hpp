#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tnconf::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,     ///< I/O, schema, usage or out-of-chart input
  kCheckFailed = 2,    ///< a verification failed or a synthesis was refused
  kIdentityViolation = 3,
};

/// Runs one subcommand. args excludes the program name. Reports go to out
/// (or to --out), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tnconf::cli

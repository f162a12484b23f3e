#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iotc {

/// Exit codes shared by the subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitNoPlan = 2,
  kExitTruncated = 3,
  kExitExecutionFailed = 4,
};

/// Runs the `iotcompose` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string default_vocabulary_path();

}  // namespace iotc

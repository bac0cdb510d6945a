#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dichotomy::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kAnalysisError = 1,  // also usage errors
  kIoError = 2,
  kSchemaError = 3,
  kGuardError = 4,
};

/// Runs one CLI invocation. `args` excludes the program name. When no
/// --format is given, text is chosen for terminals and json otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        bool stdout_is_terminal = false);

}  // namespace dichotomy::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iscc {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,  // bad flags, unreadable or invalid config
  kExitInfeasible = 2,  // sensing threshold could not be met
  kExitInternal = 3,    // unexpected failure or a failed oracle suite
};

/// Verbs: run, sweep, oracle-check, report, validate-config. `args` excludes
/// the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int parse_and_dispatch(int argc, char** argv);

}  // namespace iscc

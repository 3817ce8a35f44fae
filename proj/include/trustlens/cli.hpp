#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trustlens/error.hpp"

namespace trustlens::cli {

/// Process exit codes. Each error class maps to exactly one code.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kConfig = 3,
  kTransport = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`; interactive sessions read from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace trustlens::cli

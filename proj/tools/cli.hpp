#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvlorenz::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2 };

/// Runs one invocation; args excludes the program name. Primary output goes
/// to `out` only on success, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvlorenz::cli

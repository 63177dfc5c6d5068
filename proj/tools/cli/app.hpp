#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnilab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvariant = 2, kIo = 3 };

/// Runs the command line `args` (program name excluded). Paths of written
/// files go to `out`, diagnostics and wall-clock time to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnilab::cli

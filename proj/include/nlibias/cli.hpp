#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace nlibias::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kIo = 3,
    kData = 4,
    kThreshold = 5,
};

/// Runs the command line `args` (args[0] is the program name). Reports go to `out`,
/// diagnostics and load summaries to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace nlibias::cli

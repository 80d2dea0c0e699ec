#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace deepcomm::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kNumericalError = 3 };

/// Runs the `deepcomm` command line with `args` (program name excluded).
/// Primary output goes to `out` unless an output file is given.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace deepcomm::cli

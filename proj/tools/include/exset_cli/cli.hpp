#pragma once

#include <iosfwd>

namespace exset::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kNumerical = 4 };

/// Runs the command line; errors are reported as one line on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exset::cli

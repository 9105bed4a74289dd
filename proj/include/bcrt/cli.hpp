#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcrt::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kGateFailure = 1, kConfigError = 2 };

/// Runs one command line. `args` excludes the program name. Table output goes
/// to `out` unless --out is given; diagnostics and timings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace bcrt::cli

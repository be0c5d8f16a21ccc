#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bsrd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Runs one command line (args excludes the program name) and returns the
/// process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsrd::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gfm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDiverged = 2;

/// Parses `args` (without the program name) and runs one subcommand:
/// run, sweep, linear, plot or list. Never throws; returns an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gfm::cli

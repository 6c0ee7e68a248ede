#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tti::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error,
/// 3 corrupt checkpoint.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCorruptCheckpoint = 3;

/// Entry point shared by the executable and the tests. args[0] is the program
/// name, args[1] the subcommand (gen-world, gen-tasks, train, eval, sweep,
/// report). Diagnostics go to `err`, progress to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tti::cli

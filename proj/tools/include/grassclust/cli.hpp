#pragma once

#include <iosfwd>

namespace grassclust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitDegenerate = 2;

/// Entry point of the `grassclust` tool. Returns 0 on success, 1 on input or
/// configuration errors (including unknown subcommands) and 2 when the data
/// are degenerate.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grassclust

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace plcbench::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands: serve, bench, compare, replay.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plcbench::bench

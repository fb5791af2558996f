// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>

namespace plcbench {

using Duration = std::chrono::nanoseconds;

/// A point on the runtime clock. Simulated networks start at the epoch;
/// real networks use the monotonic clock.
using Instant = std::chrono::time_point<std::chrono::steady_clock, Duration>;

inline constexpr Instant kEpoch{};

inline std::int64_t to_micros(Duration d) {
  return std::chrono::duration_cast<std::chrono::microseconds>(d).count();
}

inline Duration from_micros(std::int64_t us) { return std::chrono::microseconds{us}; }

}  // namespace plcbench

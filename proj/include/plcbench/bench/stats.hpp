// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "plcbench/bench/types.hpp"

namespace plcbench::bench {

/// Order statistics are sample values in whole microseconds (nearest rank).
struct LatencyStats {
  std::uint64_t count = 0;
  double mean_us = 0.0;
  std::int64_t median_us = 0;
  std::int64_t p95_us = 0;
  std::int64_t p99_us = 0;
  std::int64_t min_us = 0;
  std::int64_t max_us = 0;
  /// Population standard deviation.
  double stddev_us = 0.0;

  bool operator==(const LatencyStats&) const = default;
};

/// Nearest-rank percentile of an ascending sequence: element ceil(p/100 * n) - 1.
std::size_t nearest_rank_index(unsigned percentile, std::size_t n);

/// Over Ok samples only. Throws EmptyInputError when there are none.
LatencyStats compute_stats(std::span<const LatencySample> samples);

}  // namespace plcbench::bench

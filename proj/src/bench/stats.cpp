// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "plcbench/common/error.hpp"

namespace plcbench::bench {

std::size_t nearest_rank_index(unsigned percentile, std::size_t n) {
  // Integer ceil avoids 0.95 * 100 rounding up to rank 96.
  const std::size_t rank = (static_cast<std::size_t>(percentile) * n + 99) / 100;
  return std::clamp<std::size_t>(rank, 1, n) - 1;
}

LatencyStats compute_stats(std::span<const LatencySample> samples) {
  std::vector<std::int64_t> us;
  us.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.outcome == Outcome::Ok) {
      us.push_back(to_micros(s.latency));
    }
  }
  if (us.empty()) {
    throw EmptyInputError("no Ok samples");
  }
  std::sort(us.begin(), us.end());
  const auto n = us.size();

  LatencyStats st;
  st.count = n;
  st.min_us = us.front();
  st.max_us = us.back();
  st.median_us = us[nearest_rank_index(50, n)];
  st.p95_us = us[nearest_rank_index(95, n)];
  st.p99_us = us[nearest_rank_index(99, n)];

  // Exact integer sum, then two-pass variance.
  std::int64_t sum = 0;
  for (auto v : us) {
    sum += v;
  }
  st.mean_us = static_cast<double>(sum) / static_cast<double>(n);
  double sq = 0.0;
  for (auto v : us) {
    const double d = static_cast<double>(v) - st.mean_us;
    sq += d * d;
  }
  st.stddev_us = std::sqrt(sq / static_cast<double>(n));
  return st;
}

}  // namespace plcbench::bench

// SPDX-License-Identifier: Apache-2.0
// Naive reference statistics: sort, index by rank, sum in long double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "plcbench/bench/stats.hpp"

namespace plcbench::testing {

struct OracleStats {
  std::uint64_t count = 0;
  long double mean = 0;
  std::int64_t median = 0;
  std::int64_t p95 = 0;
  std::int64_t p99 = 0;
  std::int64_t min = 0;
  std::int64_t max = 0;
  long double stddev = 0;
};

/// Smallest 1-based rank r with r / n >= p / 100, found by scanning.
inline std::size_t oracle_rank(unsigned p, std::size_t n) {
  std::size_t r = 1;
  while (r * 100 < static_cast<std::size_t>(p) * n) {
    ++r;
  }
  return r;
}

inline OracleStats oracle_stats(const std::vector<bench::LatencySample>& samples) {
  std::vector<std::int64_t> us;
  for (const auto& s : samples) {
    if (s.outcome == bench::Outcome::Ok) {
      us.push_back(s.latency.count() / 1000);
    }
  }
  std::sort(us.begin(), us.end());
  OracleStats o;
  o.count = us.size();
  long double sum = 0;
  for (auto v : us) {
    sum += static_cast<long double>(v);
  }
  o.mean = sum / static_cast<long double>(us.size());
  long double sq = 0;
  for (auto v : us) {
    const long double d = static_cast<long double>(v) - o.mean;
    sq += d * d;
  }
  o.stddev = std::sqrt(sq / static_cast<long double>(us.size()));
  o.median = us[oracle_rank(50, us.size()) - 1];
  o.p95 = us[oracle_rank(95, us.size()) - 1];
  o.p99 = us[oracle_rank(99, us.size()) - 1];
  o.min = us.front();
  o.max = us.back();
  return o;
}

inline bool close_rel(double got, long double want, long double tol = 1e-12L) {
  const long double scale = std::max<long double>(1.0L, std::fabs(want));
  return std::fabs(static_cast<long double>(got) - want) <= tol * scale;
}

/// True when `s` equals the oracle: order statistics exactly, mean and
/// stddev within relative 1e-12.
inline bool matches_oracle(const bench::LatencyStats& s, const OracleStats& o) {
  return s.count == o.count && s.median_us == o.median && s.p95_us == o.p95 && s.p99_us == o.p99 &&
         s.min_us == o.min && s.max_us == o.max && close_rel(s.mean_us, o.mean) && close_rel(s.stddev_us, o.stddev);
}

/// Whole-microsecond samples with a sprinkling of non-Ok outcomes. Shapes
/// vary: narrow, wide, heavy-tailed and constant.
inline std::vector<bench::LatencySample> random_samples(std::mt19937_64& rng, std::size_t n) {
  std::vector<bench::LatencySample> out;
  out.reserve(n);
  const auto shape = rng() % 4;
  const std::int64_t base = static_cast<std::int64_t>(rng() % 20'000);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t us = base;
    switch (shape) {
      case 0: us += static_cast<std::int64_t>(rng() % 1'000); break;
      case 1: us += static_cast<std::int64_t>(rng() % 10'000'000); break;
      case 2: us += static_cast<std::int64_t>(std::exp2(static_cast<double>(rng() % 30))); break;
      default: break;
    }
    bench::Outcome outcome = bench::Outcome::Ok;
    if (i > 0 && rng() % 50 == 0) {
      outcome = rng() % 2 == 0 ? bench::Outcome::Timeout : bench::Outcome::Error;
    }
    out.push_back({i, outcome == bench::Outcome::Ok ? Duration{us * 1000} : Duration{0}, outcome});
  }
  return out;
}

}  // namespace plcbench::testing

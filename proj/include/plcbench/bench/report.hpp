// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcbench/bench/stats.hpp"

namespace plcbench::bench {

struct Cell {
  Protocol protocol = Protocol::Fins;
  Kind kind = Kind::Read;
  bool pipelined = false;
  /// Present when the cell ran; otherwise `failure` says why.
  std::optional<LatencyStats> stats;
  std::string failure;
  std::uint64_t non_ok = 0;

  bool operator==(const Cell&) const = default;
};

struct Report {
  std::vector<Cell> cells;
  /// Flattened run configuration, e.g. "mode" -> "sim".
  std::map<std::string, std::string> config;
  /// UTC, ISO 8601.
  std::string emitted_at;
  std::int64_t clock_resolution_ns = 1;

  bool operator==(const Report&) const = default;
};

enum class Format { Markdown, Csv, Json };

Format parse_format(std::string_view text);
/// Markdown: one row per protocol present, FINS, CIP, UDP, OPC order, means
/// in ms with two decimals, "-" for cells not run, "FAILED" for failed cells.
std::string format_report(const Report& report, Format format);
/// Inverse of the JSON format. Throws FormatError.
Report parse_report_json(std::string_view text);

std::string format_stats_json(const LatencyStats& stats);

/// trial_index,latency_us,outcome; latency left empty for non-Ok rows.
std::string format_samples_csv(std::span<const LatencySample> samples);
/// Throws FormatError with the offending line number.
std::vector<LatencySample> parse_samples_csv(std::string_view text);

std::string utc_timestamp();

}  // namespace plcbench::bench

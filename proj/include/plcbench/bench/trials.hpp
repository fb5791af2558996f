// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "plcbench/bench/report.hpp"
#include "plcbench/bench/testbed.hpp"

namespace plcbench::bench {

struct TrialRun {
  /// Measured trials only, in trial order.
  std::vector<LatencySample> samples;
  std::uint64_t warmup_run = 0;
  std::uint64_t non_ok = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// Warmup then trials, strictly one at a time. Aborts once non-Ok outcomes
/// exceed 1% of warmup + trials.
TrialRun run_trials(Testbed& testbed, const BenchConfig& config);
/// Builds its own testbed from `config`.
TrialRun run_trials(const BenchConfig& config);

struct CompareConfig {
  Mode mode = Mode::Simulated;
  std::uint64_t trials = 100'000;
  std::uint64_t warmup = 1'000;
  std::uint64_t seed = 1;
  plcsim::EmulatorSettings settings;
};

/// The twelve cells: FINS read, write, pipelined cycle; CIP explicit read,
/// explicit write, linked cycle; UDP and OPC read, write, cycle.
std::vector<BenchConfig> compare_matrix(const CompareConfig& config);
Report run_compare(const CompareConfig& config);

}  // namespace plcbench::bench

// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/trials.hpp"

#include <random>

#include "plcbench/common/error.hpp"

namespace plcbench::bench {

namespace {

Duration to_whole_micros(Duration d) { return std::chrono::round<std::chrono::microseconds>(d); }

std::map<std::string, std::string> config_echo(const CompareConfig& c) {
  const auto& s = c.settings;
  return {{"mode", to_string(c.mode)},
          {"trials", std::to_string(c.trials)},
          {"warmup", std::to_string(c.warmup)},
          {"seed", std::to_string(c.seed)},
          {"task_period_us", std::to_string(to_micros(s.scan.task_period))},
          {"one_way_delay_us", std::to_string(to_micros(s.channel.one_way_delay))},
          {"jitter_us", std::to_string(to_micros(s.channel.jitter))},
          {"rpi_us", std::to_string(to_micros(s.rpi))},
          {"scan_rate_us", std::to_string(to_micros(s.scan_rate))},
          {"timeout_us", std::to_string(to_micros(s.timeout))}};
}

}  // namespace

TrialRun run_trials(Testbed& testbed, const BenchConfig& config) {
  config.validate();
  Session& session = testbed.open(config.protocol, config.pipelined);
  net::Network& network = testbed.network();

  // Simulated time has no scheduling noise; without a random idle gap every
  // trial would start at the same scan phase.
  std::mt19937_64 rng(config.seed);
  const auto gap_span = std::max<std::int64_t>(1, to_micros(session.phase_period()));
  std::uniform_int_distribution<std::int64_t> gap_us(0, gap_span - 1);

  TrialRun run;
  const std::uint64_t total = config.warmup + config.trials;
  run.samples.reserve(config.trials);
  for (std::uint64_t i = 0; i < total; ++i) {
    if (network.simulated()) {
      network.sleep_for(from_micros(gap_us(rng)));
    }
    const double nonce = testbed.next_nonce();
    LatencySample sample;
    sample.trial_index = i < config.warmup ? i : i - config.warmup;
    std::string failure;
    try {
      sample.latency = to_whole_micros(session.run(config.kind, nonce));
    } catch (const TimeoutError& e) {
      sample.outcome = Outcome::Timeout;
      failure = e.what();
    } catch (const Error& e) {
      sample.outcome = Outcome::Error;
      failure = e.what();
    }
    if (sample.outcome != Outcome::Ok) {
      ++run.non_ok;
      if (run.diagnostic.empty()) {
        run.diagnostic = "trial " + std::to_string(i) + " " + to_string(sample.outcome) + ": " + failure;
      }
      if (run.non_ok * 100 > total) {
        run.aborted = true;
        run.diagnostic = std::to_string(run.non_ok) + " non-ok outcomes exceed 1% of " + std::to_string(total) +
                         " trials; first: " + run.diagnostic;
        break;
      }
    }
    if (i < config.warmup) {
      ++run.warmup_run;
    } else {
      run.samples.push_back(sample);
    }
  }
  testbed.close();
  return run;
}

TrialRun run_trials(const BenchConfig& config) {
  config.validate();
  Testbed testbed(config.mode, config.settings);
  return run_trials(testbed, config);
}

std::vector<BenchConfig> compare_matrix(const CompareConfig& config) {
  struct CellSpec {
    Protocol protocol;
    Kind kind;
    bool pipelined;
  };
  static constexpr CellSpec kCells[] = {
      {Protocol::Fins, Kind::Read, false},        {Protocol::Fins, Kind::Write, false},
      {Protocol::Fins, Kind::Cycle, true},        {Protocol::CipExplicit, Kind::Read, false},
      {Protocol::CipExplicit, Kind::Write, false}, {Protocol::CipLinked, Kind::Cycle, false},
      {Protocol::Udp, Kind::Read, false},         {Protocol::Udp, Kind::Write, false},
      {Protocol::Udp, Kind::Cycle, false},        {Protocol::Opc, Kind::Read, false},
      {Protocol::Opc, Kind::Write, false},        {Protocol::Opc, Kind::Cycle, false},
  };
  std::vector<BenchConfig> out;
  std::uint64_t n = 0;
  for (const auto& cell : kCells) {
    BenchConfig b;
    b.protocol = cell.protocol;
    b.kind = cell.kind;
    b.pipelined = cell.pipelined;
    b.trials = config.trials;
    b.warmup = config.warmup;
    b.mode = config.mode;
    b.seed = config.seed + n++;
    b.settings = config.settings;
    out.push_back(std::move(b));
  }
  return out;
}

Report run_compare(const CompareConfig& config) {
  Report report;
  report.config = config_echo(config);
  report.clock_resolution_ns = config.mode == Mode::Simulated
                                   ? 1
                                   : std::chrono::duration_cast<std::chrono::nanoseconds>(
                                         std::chrono::steady_clock::duration{1})
                                         .count();
  Testbed testbed(config.mode, config.settings);
  for (const auto& bench : compare_matrix(config)) {
    Cell cell;
    cell.protocol = bench.protocol;
    cell.kind = bench.kind;
    cell.pipelined = bench.pipelined;
    try {
      const TrialRun run = run_trials(testbed, bench);
      cell.non_ok = run.non_ok;
      if (run.aborted) {
        cell.failure = run.diagnostic;
      } else {
        cell.stats = compute_stats(run.samples);
      }
    } catch (const Error& e) {
      testbed.close();
      cell.failure = e.what();
    }
    report.cells.push_back(std::move(cell));
  }
  report.emitted_at = utc_timestamp();
  return report;
}

}  // namespace plcbench::bench

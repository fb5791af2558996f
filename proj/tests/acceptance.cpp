// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "plcbench/bench/report.hpp"
#include "plcbench/bench/stats.hpp"
#include "plcbench/bench/trials.hpp"
#include "plcbench/common/error.hpp"
#include "plcbench/fins/frame.hpp"
#include "support/generators.hpp"
#include "support/stats_oracle.hpp"

using namespace plcbench;
using namespace plcbench::bench;
using namespace std::chrono_literals;

namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// Default settings: 1 ms one-way delay, no jitter, 1 ms scan, 10 ms poll.
double sim_mean_us(Protocol p, Kind k, std::uint64_t trials, bool pipelined = false) {
  BenchConfig c;
  c.protocol = p;
  c.kind = k;
  c.trials = trials;
  c.warmup = 100;
  c.pipelined = pipelined;
  const auto run = run_trials(c);
  if (run.aborted || run.non_ok != 0) {
    throw Error(std::string(to_string(p)) + " " + to_string(k) + ": " + run.diagnostic);
  }
  return compute_stats(run.samples).mean_us;
}

Verdict pipelining_payoff() {
  const double read = sim_mean_us(Protocol::Fins, Kind::Read, 10'000);
  const double write = sim_mean_us(Protocol::Fins, Kind::Write, 10'000);
  const double piped = sim_mean_us(Protocol::Fins, Kind::Cycle, 10'000, true);
  return {piped < 0.9 * (write + read), "pipelined " + fmt("%.1f", piped) + " us vs 0.9 x (write + read) " +
                                            fmt("%.1f", 0.9 * (write + read)) + " us"};
}

Verdict layering_penalty() {
  const double scan_us = 10'000.0;
  const double cip = sim_mean_us(Protocol::CipExplicit, Kind::Read, 10'000);
  const double opc = sim_mean_us(Protocol::Opc, Kind::Read, 10'000);
  return {opc >= cip + 0.25 * scan_us,
          "OPC read " + fmt("%.1f", opc) + " us vs CIP read + 0.25 x scan " + fmt("%.1f", cip + 0.25 * scan_us) + " us"};
}

Verdict asynchrony_halving() {
  const double linked = sim_mean_us(Protocol::CipLinked, Kind::Cycle, 10'000);
  const double write = sim_mean_us(Protocol::CipExplicit, Kind::Write, 10'000);
  const double read = sim_mean_us(Protocol::CipExplicit, Kind::Read, 10'000);
  return {linked <= write + read,
          "linked cycle " + fmt("%.1f", linked) + " us vs explicit write + read " + fmt("%.1f", write + read) + " us"};
}

Verdict udp_echo_bound() {
  BenchConfig c;
  c.protocol = Protocol::Udp;
  c.kind = Kind::Cycle;
  c.trials = 10'000;
  c.warmup = 0;
  const auto run = run_trials(c);
  std::size_t inside = 0;
  for (const auto& s : run.samples) {
    inside += s.outcome == Outcome::Ok && s.latency >= 3ms && s.latency <= 4ms ? 1 : 0;
  }
  return {run.samples.size() == 10'000 && inside == run.samples.size(),
          std::to_string(inside) + "/" + std::to_string(run.samples.size()) + " samples in [3 ms, 4 ms]"};
}

Verdict opc_cycle_matches_read() {
  const double read = sim_mean_us(Protocol::Opc, Kind::Read, 10'000);
  const double cycle = sim_mean_us(Protocol::Opc, Kind::Cycle, 10'000);
  const double rel = std::abs(cycle - read) / read;
  return {rel <= 0.10, "cycle " + fmt("%.1f", cycle) + " us, read " + fmt("%.1f", read) + " us, difference " +
                           fmt("%.2f", rel * 100.0) + "%"};
}

Verdict scan_copy_invariant() {
  testing::SimPlc s;
  testing::Rng rng(601);
  std::size_t failures = 0;
  constexpr int kScans = 100'000;
  for (int i = 0; i < kScans; ++i) {
    const double v = testing::random_double(rng);
    s.plc.set_value("CIn", v);
    const auto report = s.plc.scan_step();
    const bool ok = bits_of(s.plc.value("COut")) == bits_of(v) && report.copied.size() == 1 &&
                    report.copied[0].second == bits_of(v);
    failures += ok ? 0 : 1;
  }
  return {failures == 0, std::to_string(kScans) + " scans, " + std::to_string(failures) + " mismatches"};
}

Verdict fins_codec_round_trip() {
  testing::Rng rng(701);
  std::size_t bad_round_trips = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto frame = testing::random_frame(rng);
    try {
      bad_round_trips += fins::decode_frame(fins::encode_frame(frame)) == frame ? 0 : 1;
    } catch (const std::exception&) {
      ++bad_round_trips;
    }
  }
  // A mutation may still be a valid frame; then it must re-encode to itself.
  std::size_t unclassified = 0;
  std::size_t rejected = 0;
  for (int i = 0; i < 10'000; ++i) {
    Bytes b = fins::encode_frame(testing::random_frame(rng));
    switch (rng() % 3) {
      case 0: b.resize(rng() % (b.size() + 1)); break;
      case 1: b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255); break;
      default:
        for (auto n = 1 + rng() % 5; n > 0; --n) {
          b.push_back(static_cast<std::uint8_t>(rng()));
        }
    }
    try {
      unclassified += fins::encode_frame(fins::decode_frame(b)) == b ? 0 : 1;
    } catch (const DecodeError& e) {
      ++rejected;
      unclassified += e.offset() <= b.size() && std::string(to_string(e.kind())) != "?" ? 0 : 1;
    } catch (...) {
      ++unclassified;
    }
  }
  return {bad_round_trips == 0 && unclassified == 0,
          "100000 round trips, " + std::to_string(bad_round_trips) + " mismatches; 10000 mutations, " +
              std::to_string(rejected) + " rejected, " + std::to_string(unclassified) + " unclassified"};
}

Verdict stats_oracle() {
  std::mt19937_64 rng(801);
  std::size_t mismatches = 0;
  std::uint64_t total = 0;
  for (int round = 0; round < 1'000; ++round) {
    std::size_t n = 1 + rng() % 100'000;
    if (round == 0) {
      n = 1;
    } else if (round == 1) {
      n = 100'000;
    }
    const auto samples = testing::random_samples(rng, n);
    total += n;
    mismatches += testing::matches_oracle(compute_stats(samples), testing::oracle_stats(samples)) ? 0 : 1;
  }
  return {mismatches == 0,
          "1000 sets, " + std::to_string(total) + " samples, " + std::to_string(mismatches) + " mismatches"};
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string part;
  while (std::getline(ss, part, sep)) {
    out.push_back(part);
  }
  return out;
}

std::string trim_ws(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Verdict table_rendering() {
  std::ifstream in(PLCBENCH_REFERENCE_TABLES);
  if (!in) {
    return {false, "cannot open reference tables"};
  }
  // Reference layout: tab-separated header, a dashed rule, then one row per protocol.
  std::vector<std::vector<std::string>> reference;
  std::vector<std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    if (header.empty()) {
      if (line.rfind("Protocol\tRead, ms", 0) == 0) {
        header = split_on(line, '\t');
      }
      continue;
    }
    if (line.empty() || line[0] == '-') {
      if (!reference.empty()) {
        break;
      }
      continue;
    }
    reference.push_back(split_on(line, '\t'));
  }
  if (header.size() != 4 || reference.size() != 4) {
    return {false, "reference table not found"};
  }

  const Protocol row_protocols[] = {Protocol::Fins, Protocol::CipExplicit, Protocol::Udp, Protocol::Opc};
  Report report;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t k = 0; k < 3; ++k) {
      Cell c;
      c.protocol = row_protocols[r];
      if (c.protocol == Protocol::CipExplicit && k == 2) {
        c.protocol = Protocol::CipLinked;
      }
      c.kind = static_cast<Kind>(k);
      LatencyStats s;
      s.count = 1;
      s.mean_us = std::stod(reference[r][k + 1]) * 1000.0;
      c.stats = s;
      report.cells.push_back(c);
    }
  }
  const auto md = format_report(report, Format::Markdown);
  std::vector<std::vector<std::string>> rendered;
  std::stringstream ss(md);
  while (std::getline(ss, line)) {
    auto parts = split_on(line, '|');
    std::vector<std::string> cells;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      cells.push_back(trim_ws(parts[i]));
    }
    rendered.push_back(cells);
  }
  bool same = rendered.size() == 6 && rendered[0] == header;
  for (std::size_t r = 0; same && r < 4; ++r) {
    same = rendered[r + 2] == reference[r];
  }
  return {same, same ? "header and 4 x 4 rows identical" : "rendered table differs:\n" + md};
}

Verdict loopback_smoke() {
  const fs::path dir = fs::temp_directory_path() / ("plcbench_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path out = dir / "report.json";
  const std::string cmd =
      std::string(PLCBENCH_CLI) + " compare --mode loopback --trials 1000 --out " + out.string() + " > " +
      (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  try {
    std::ifstream in(out);
    std::stringstream text;
    text << in.rdbuf();
    const auto report = parse_report_json(text.str());
    std::uint64_t ok = 0;
    std::uint64_t non_ok = 0;
    std::size_t with_stats = 0;
    for (const auto& c : report.cells) {
      non_ok += c.non_ok;
      if (c.stats) {
        ++with_stats;
        ok += c.stats->count;
      }
    }
    const double ok_share = ok + non_ok == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(ok + non_ok);
    v.pass = status == 0 && report.cells.size() == 12 && with_stats == 12 && ok_share >= 0.99 && seconds < 300.0;
    v.detail = std::to_string(report.cells.size()) + " cells, " + fmt("%.3f", ok_share * 100.0) + "% ok, " +
               fmt("%.1f", seconds) + " s";
  } catch (const std::exception& e) {
    v.detail = std::string("no usable report: ") + e.what();
  }
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"pipelining payoff", pipelining_payoff},
      {"layering penalty", layering_penalty},
      {"asynchrony halving direction", asynchrony_halving},
      {"UDP echo bound", udp_echo_bound},
      {"OPC cycle matches read", opc_cycle_matches_read},
      {"scan-copy invariant", scan_copy_invariant},
      {"FINS codec round trip", fins_codec_round_trip},
      {"stats oracle", stats_oracle},
      {"comparison table rendering", table_rendering},
      {"loopback smoke", loopback_smoke},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << index << " " << name << ": " << v.detail << " ["
              << fmt("%.1f", seconds) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "plcbench/common/time.hpp"
#include "plcbench/plcsim/settings.hpp"

namespace plcbench::bench {

enum class Protocol { Fins, CipExplicit, CipLinked, Udp, Opc };
enum class Kind { Read, Write, Cycle };
/// External targets a real controller at settings.host; no emulator runs.
enum class Mode { Simulated, Loopback, External };
enum class Outcome { Ok, Timeout, Error };

const char* to_string(Protocol p) noexcept;
const char* to_string(Kind k) noexcept;
const char* to_string(Mode m) noexcept;
const char* to_string(Outcome o) noexcept;
/// Row label in the comparison table: FINS, CIP, UDP or OPC.
const char* table_row(Protocol p) noexcept;

/// Accept the to_string() spellings. Throw ConfigError otherwise.
Protocol parse_protocol(std::string_view text);
Kind parse_kind(std::string_view text);
Mode parse_mode(std::string_view text);
Outcome parse_outcome(std::string_view text);

struct BenchConfig {
  Protocol protocol = Protocol::Fins;
  Kind kind = Kind::Read;
  std::uint64_t trials = 100'000;
  /// Run first and excluded from the samples.
  std::uint64_t warmup = 1'000;
  Mode mode = Mode::Simulated;
  /// FINS cycle only: write and read sent back to back.
  bool pipelined = false;
  /// Seeds the idle gap drawn before each simulated trial.
  std::uint64_t seed = 1;
  plcsim::EmulatorSettings settings;

  /// Throws ConfigError when trials is 0 or the protocol cannot do `kind`.
  void validate() const;
};

/// Latency is whole microseconds and only meaningful for Ok outcomes.
struct LatencySample {
  std::uint64_t trial_index = 0;
  Duration latency{0};
  Outcome outcome = Outcome::Ok;

  bool operator==(const LatencySample&) const = default;
};

}  // namespace plcbench::bench

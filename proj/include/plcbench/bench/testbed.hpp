// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "plcbench/bench/types.hpp"
#include "plcbench/net/network.hpp"
#include "plcbench/plcsim/emulator.hpp"

namespace plcbench::bench {

/// One protocol's client side, ready to run single operations.
class Session {
 public:
  virtual ~Session() = default;
  /// Runs one operation and returns its latency. Write and Cycle use `nonce`.
  virtual Duration run(Kind kind, double nonce) = 0;
  /// Longest period the result depends on; simulated trials are preceded by
  /// an idle gap drawn from [0, phase_period()).
  [[nodiscard]] virtual Duration phase_period() const = 0;
};

/// Network, emulator (unless external) and the current protocol session.
/// Tag links and the OPC gateway exist only while their session is open.
class Testbed {
 public:
  Testbed(Mode mode, plcsim::EmulatorSettings settings);
  ~Testbed();

  Testbed(const Testbed&) = delete;
  Testbed& operator=(const Testbed&) = delete;

  /// Closes the previous session first.
  Session& open(Protocol protocol, bool pipelined = false);
  void close();

  /// Unique per call for the testbed's lifetime, never 0.
  double next_nonce();

  [[nodiscard]] Mode mode() const { return mode_; }
  [[nodiscard]] net::Network& network() { return *network_; }
  /// Null in external mode.
  [[nodiscard]] plcsim::Emulator* emulator() { return emulator_.get(); }
  [[nodiscard]] const plcsim::EmulatorSettings& settings() const { return settings_; }

 private:
  Mode mode_;
  plcsim::EmulatorSettings settings_;
  std::unique_ptr<net::Network> network_;
  std::unique_ptr<plcsim::Emulator> emulator_;
  std::unique_ptr<Session> session_;
  std::uint64_t nonce_counter_ = 0;
};

}  // namespace plcbench::bench

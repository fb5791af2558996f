// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "plcbench/ciplite/link.hpp"
#include "plcbench/net/network.hpp"
#include "plcbench/plcsim/variable.hpp"

namespace plcbench::plcsim {

struct EmulatorPorts {
  std::uint16_t fins = 9600;
  std::uint16_t cip = 44818;
  std::uint16_t echo = 9601;
};

struct EmulatorOptions {
  EmulatorPorts ports;
  std::string node_name = "plc";
  /// Variable written by raw UDP values, and the one answered to queries.
  std::string udp_input = "CIn";
  std::string udp_output = "COut";
  /// When set, one ScanReport line per scan is written here.
  std::ostream* log = nullptr;
};

enum class ServedProtocol { Fins, Cip, RawUdp };

struct ScanReport {
  std::uint64_t scan_index = 0;
  Instant time{};
  std::uint32_t fins_requests = 0;
  std::uint32_t cip_requests = 0;
  std::uint32_t link_messages = 0;
  std::uint32_t udp_datagrams = 0;
  std::uint32_t writes_applied = 0;
  std::uint32_t reads_served = 0;
  std::uint32_t echoes_sent = 0;
  std::uint32_t links_produced = 0;
  std::uint32_t malformed = 0;
  std::uint32_t messages_emitted = 0;
  /// (destination variable, copied bit pattern) for each copy rule.
  std::vector<std::pair<std::string, std::uint64_t>> copied;

  [[nodiscard]] std::uint32_t requests_processed() const {
    return fins_requests + cip_requests + udp_datagrams;
  }
  [[nodiscard]] std::string to_log_line() const;
  bool operator==(const ScanReport&) const = default;
};

/// Scan-cycle controller emulator. Every scan runs, in order:
///   1. drain arrived datagrams into per-endpoint FIFO queues
///   2. apply FINS/CIP writes and consumed link data in arrival order
///   3. execute copy rules
///   4. serve queued reads against the post-copy state
///   5. advance the two alternating UDP echo rungs
///   6. publish producer tags whose RPI elapsed
/// Responses leave at the end of the scan in request arrival order.
///
/// Works the same on a SimNetwork (deterministic simulated clock) and on a
/// UdpNetwork (real loopback sockets, scans on a background thread).
class Emulator final : public ciplite::LinkNode, public net::Actor {
 public:
  /// Throws ConfigError for an invalid variable set or copy rule and
  /// StartupError when a port cannot be bound.
  Emulator(std::vector<Variable> variables, ScanConfig scan, net::Network& network,
           EmulatorOptions options = {});
  ~Emulator() override;

  Emulator(const Emulator&) = delete;
  Emulator& operator=(const Emulator&) = delete;

  /// Runs one scan at the network's current time.
  ScanReport scan_step();

  /// Scans every task period for `duration`.
  void run_for(Duration duration);
  /// Scans until `count` more requests of `protocol` were answered. Returns
  /// the number answered (less than `count` only on timeout).
  std::uint64_t run_until_served(ServedProtocol protocol, std::uint64_t count, Duration timeout);

  /// Background scanning: simulated scans advance with the network clock,
  /// real ones run on their own thread.
  void start();
  void stop();
  [[nodiscard]] bool running() const { return running_; }

  /// Simulated clock. Throws UnsupportedModeError on a real network.
  [[nodiscard]] Instant sim_now() const;

  [[nodiscard]] double value(std::string_view name) const;
  void set_value(std::string_view name, double value);
  [[nodiscard]] std::vector<Variable> snapshot() const;

  [[nodiscard]] std::uint64_t scans() const { return scans_.load(); }
  [[nodiscard]] std::uint64_t served(ServedProtocol protocol) const;
  [[nodiscard]] const ScanConfig& scan_config() const { return scan_; }

  [[nodiscard]] net::Address fins_address() const { return fins_->local_address(); }
  [[nodiscard]] net::Address cip_address() const { return cip_->local_address(); }
  [[nodiscard]] net::Address echo_address() const { return echo_->local_address(); }

  /// Called after every scan, on the scanning thread.
  void set_scan_observer(std::function<void(const ScanReport&)> observer);

  // LinkNode
  [[nodiscard]] std::string node_name() const override { return options_.node_name; }
  [[nodiscard]] net::Address link_address() const override { return cip_address(); }
  [[nodiscard]] std::optional<ciplite::TagDirection> tag_direction(std::string_view tag) const override;
  void add_production(ciplite::Production production) override;
  void add_consumption(std::uint32_t connection_id, std::string tag) override;
  void remove_connection(std::uint32_t connection_id) override;
  [[nodiscard]] bool has_connection(std::uint32_t connection_id) const override;
  [[nodiscard]] std::optional<ciplite::ConsumedValue> consumed(std::uint32_t connection_id) const override;

  // Actor
  [[nodiscard]] std::optional<Instant> next_wakeup() const override;
  void wake(Instant now) override;

 private:
  struct Outbound {
    std::uint64_t order;
    net::Address to;
    Bytes payload;
    net::Transport* via = nullptr;
  };
  struct RungSlot {
    net::Address reply_to;
    Bytes payload;
  };

  ScanReport scan_locked(Instant now);

  net::Network& network_;
  EmulatorOptions options_;
  ScanConfig scan_;
  std::vector<std::pair<std::size_t, std::size_t>> copy_indices_;
  std::optional<std::size_t> udp_input_;
  std::optional<std::size_t> udp_output_;

  std::unique_ptr<net::Transport> fins_;
  std::unique_ptr<net::Transport> cip_;
  std::unique_ptr<net::Transport> echo_;

  mutable std::mutex mutex_;
  VariableTable table_;
  ciplite::LinkTable links_;
  std::deque<net::Datagram> echo_queue_;
  std::array<std::optional<RungSlot>, 2> rungs_;
  std::function<void(const ScanReport&)> observer_;

  std::atomic<std::uint64_t> scans_{0};
  std::array<std::atomic<std::uint64_t>, 3> served_{};
  bool running_ = false;
  std::atomic<std::int64_t> next_scan_ns_{0};
};

}  // namespace plcbench::plcsim

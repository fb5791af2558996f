// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>

#include "plcbench/fins/frame.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::fins {

struct ClientOptions {
  Duration timeout = std::chrono::milliseconds{500};
  /// icf/gct/addressing used for every request; sid is overwritten.
  Header header{};
};

/// Memory-area client for one caller. Several requests may be outstanding at
/// once; responses are always matched by sid, never by arrival position.
class Client {
 public:
  Client(net::Network& network, std::unique_ptr<net::Transport> transport, net::Address server,
         ClientOptions options = {});

  std::vector<std::uint16_t> read_words(std::uint16_t address, std::uint16_t count);
  void write_words(std::uint16_t address, std::span<const std::uint16_t> words);

  double read(std::uint16_t dm_address);
  void write(std::uint16_t dm_address, double value);

  /// Sends write(value) and read(read_address) back to back, ignores the
  /// write acknowledgment, returns the read result. One latency sample spans
  /// both requests.
  double cycle_pipelined(std::uint16_t write_address, double value, std::uint16_t read_address);

  /// Low-level access. submit() returns the sid used; a discarded request's
  /// response is consumed silently when it arrives.
  std::uint8_t submit(const Command& command, bool discard_response = false);
  Response await(std::uint8_t sid, Instant deadline);

  /// Latency of the last completed operation (send to response decode).
  [[nodiscard]] Duration last_latency() const { return last_latency_; }
  [[nodiscard]] std::size_t outstanding() const { return outstanding_.size(); }
  /// Responses that matched no outstanding sid, or failed to decode.
  [[nodiscard]] std::uint64_t unmatched_responses() const { return unmatched_; }
  [[nodiscard]] const ClientOptions& options() const { return options_; }

 private:
  struct Pending {
    Instant sent_at;
    bool discard;
  };
  struct Completed {
    Response response;
    Instant sent_at;
  };

  std::uint8_t next_sid();
  void handle(const net::Datagram& datagram);
  static void check(const Response& response);

  net::Network& network_;
  std::unique_ptr<net::Transport> transport_;
  net::Address server_;
  ClientOptions options_;
  std::uint8_t last_sid_ = 0;
  std::map<std::uint8_t, Pending> outstanding_;
  std::map<std::uint8_t, Completed> completed_;
  Duration last_latency_{0};
  std::uint64_t unmatched_ = 0;
};

}  // namespace plcbench::fins

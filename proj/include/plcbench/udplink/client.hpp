// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "plcbench/net/network.hpp"

namespace plcbench::udplink {

/// Every datagram carries exactly one big-endian IEEE-754 double.
inline constexpr std::size_t kPayloadSize = 8;

/// Reserved NaN pattern asking the echo endpoint for the output variable
/// instead of an echo. It is the one payload that is never echoed verbatim.
inline constexpr std::uint64_t kQueryBits = 0x7FF4'5155'4552'5900ULL;

std::array<std::uint8_t, kPayloadSize> encode_value(double value);
/// Throws FormatError unless `payload` is exactly 8 bytes.
double decode_value(ByteView payload);

[[nodiscard]] inline bool is_query(ByteView payload) {
  return payload.size() == kPayloadSize && get_u64(payload, 0) == kQueryBits;
}

struct ClientOptions {
  Duration timeout = std::chrono::milliseconds{500};
};

/// Synchronous raw-UDP client against the two-rung echo endpoint. At most
/// one datagram of ours is ever in flight.
class Client {
 public:
  Client(net::Network& network, std::unique_ptr<net::Transport> transport, net::Address server,
         ClientOptions options = {});

  /// Emits one datagram; last_latency() becomes the local send time.
  void send(double value);
  /// Waits for one datagram. Throws TimeoutError or FormatError.
  double recv(Duration timeout);

  /// Send, then wait for the echo.
  double cycle(double value);
  /// Fire-and-confirm: send the value and wait for its echo as the
  /// acknowledgment that the controller received it.
  void write(double value);
  /// Solicit the output variable with the reserved query payload.
  double read();

  [[nodiscard]] Duration last_latency() const { return last_latency_; }
  [[nodiscard]] const ClientOptions& options() const { return options_; }

 private:
  double exchange(double outgoing);

  net::Network& network_;
  std::unique_ptr<net::Transport> transport_;
  net::Address server_;
  ClientOptions options_;
  Duration last_latency_{0};
};

}  // namespace plcbench::udplink

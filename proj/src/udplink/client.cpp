// SPDX-License-Identifier: Apache-2.0

#include "plcbench/udplink/client.hpp"

#include "plcbench/common/error.hpp"

namespace plcbench::udplink {

std::array<std::uint8_t, kPayloadSize> encode_value(double value) {
  const std::uint64_t bits = bits_of(value);
  std::array<std::uint8_t, kPayloadSize> out{};
  for (std::size_t i = 0; i < kPayloadSize; ++i) {
    out[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  }
  return out;
}

double decode_value(ByteView payload) {
  if (payload.size() != kPayloadSize) {
    throw FormatError("raw UDP payload must be 8 bytes, got " + std::to_string(payload.size()));
  }
  return double_from_bits(get_u64(payload, 0));
}

Client::Client(net::Network& network, std::unique_ptr<net::Transport> transport, net::Address server,
               ClientOptions options)
    : network_(network), transport_(std::move(transport)), server_(server), options_(options) {}

void Client::send(double value) {
  const Instant start = network_.now();
  const auto payload = encode_value(value);
  transport_->send(server_, payload);
  last_latency_ = network_.now() - start;
}

double Client::recv(Duration timeout) {
  auto d = transport_->receive(network_.now() + timeout);
  if (!d) {
    throw TimeoutError("no UDP datagram within timeout");
  }
  return decode_value(d->payload);
}

double Client::exchange(double outgoing) {
  // Anything left over from an earlier timed-out exchange is not ours to keep.
  while (transport_->try_receive()) {
  }
  const Instant start = network_.now();
  transport_->send(server_, encode_value(outgoing));
  const double reply = recv(options_.timeout);
  last_latency_ = network_.now() - start;
  return reply;
}

double Client::cycle(double value) { return exchange(value); }

void Client::write(double value) {
  const double echoed = exchange(value);
  if (!same_bits(echoed, value)) {
    throw Error("UDP write confirmation carried a different value");
  }
}

double Client::read() { return exchange(double_from_bits(kQueryBits)); }

}  // namespace plcbench::udplink

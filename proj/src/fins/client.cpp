// SPDX-License-Identifier: Apache-2.0

#include "plcbench/fins/client.hpp"

#include <sstream>

#include "plcbench/common/error.hpp"

namespace plcbench::fins {

Client::Client(net::Network& network, std::unique_ptr<net::Transport> transport, net::Address server,
               ClientOptions options)
    : network_(network), transport_(std::move(transport)), server_(server), options_(options) {}

std::uint8_t Client::next_sid() {
  // 1..255, wrapping, never 0.
  for (int attempt = 0; attempt < 255; ++attempt) {
    last_sid_ = static_cast<std::uint8_t>(last_sid_ == 255 ? 1 : last_sid_ + 1);
    auto it = outstanding_.find(last_sid_);
    if (it == outstanding_.end()) {
      return last_sid_;
    }
    if (it->second.discard) {
      // An ignored acknowledgment that never showed up; reuse its sid.
      outstanding_.erase(it);
      return last_sid_;
    }
  }
  throw Error("FINS client: 255 requests already outstanding");
}

std::uint8_t Client::submit(const Command& command, bool discard_response) {
  Request request{options_.header, command};
  request.header.sid = next_sid();
  const Bytes frame = encode_frame(request);
  outstanding_[request.header.sid] = Pending{network_.now(), discard_response};
  transport_->send(server_, frame);
  return request.header.sid;
}

void Client::handle(const net::Datagram& datagram) {
  Frame frame;
  try {
    frame = decode_frame(datagram.payload);
  } catch (const DecodeError&) {
    ++unmatched_;
    return;
  }
  auto* response = std::get_if<Response>(&frame);
  if (response == nullptr) {
    ++unmatched_;
    return;
  }
  auto it = outstanding_.find(response->header.sid);
  if (it == outstanding_.end()) {
    ++unmatched_;
    return;
  }
  if (!it->second.discard) {
    completed_[response->header.sid] = Completed{std::move(*response), it->second.sent_at};
  }
  outstanding_.erase(it);
}

Response Client::await(std::uint8_t sid, Instant deadline) {
  while (true) {
    if (auto it = completed_.find(sid); it != completed_.end()) {
      Response r = std::move(it->second.response);
      last_latency_ = network_.now() - it->second.sent_at;
      completed_.erase(it);
      return r;
    }
    if (outstanding_.count(sid) == 0) {
      throw Error("FINS client: sid " + std::to_string(sid) + " is not outstanding");
    }
    auto datagram = transport_->receive(deadline);
    if (!datagram) {
      outstanding_.erase(sid);
      std::ostringstream msg;
      msg << "FINS response for sid " << int{sid} << " timed out";
      throw TimeoutError(msg.str());
    }
    handle(*datagram);
  }
}

void Client::check(const Response& response) {
  if (response.end_code != end_code::kNormal) {
    std::ostringstream msg;
    msg << "FINS end code 0x" << std::hex << response.end_code;
    throw RemoteError(response.end_code, msg.str());
  }
}

std::vector<std::uint16_t> Client::read_words(std::uint16_t address, std::uint16_t count) {
  const auto sid = submit(MemoryAreaRead{kAreaDmWord, address, 0, count});
  Response r = await(sid, network_.now() + options_.timeout);
  check(r);
  if (r.payload.size() != count) {
    throw FormatError("FINS read returned " + std::to_string(r.payload.size()) + " words, expected " +
                      std::to_string(count));
  }
  return std::move(r.payload);
}

void Client::write_words(std::uint16_t address, std::span<const std::uint16_t> words) {
  const auto sid = submit(MemoryAreaWrite::of(address, words));
  check(await(sid, network_.now() + options_.timeout));
}

double Client::read(std::uint16_t dm_address) {
  return words_to_lreal(read_words(dm_address, kLrealWords));
}

void Client::write(std::uint16_t dm_address, double value) {
  const auto words = lreal_to_words(value);
  write_words(dm_address, words);
}

double Client::cycle_pipelined(std::uint16_t write_address, double value, std::uint16_t read_address) {
  const Instant start = network_.now();
  const auto words = lreal_to_words(value);
  submit(MemoryAreaWrite::of(write_address, words), /*discard_response=*/true);
  const auto read_sid = submit(MemoryAreaRead{kAreaDmWord, read_address, 0, kLrealWords});
  Response r = await(read_sid, start + options_.timeout);
  last_latency_ = network_.now() - start;
  check(r);
  return words_to_lreal(r.payload);
}

}  // namespace plcbench::fins

// SPDX-License-Identifier: Apache-2.0

#include "plcbench/ciplite/explicit_client.hpp"

#include "plcbench/common/error.hpp"

namespace plcbench::ciplite {

ExplicitClient::ExplicitClient(net::Network& network, std::unique_ptr<net::Transport> transport,
                               net::Address server, ExplicitClientOptions options)
    : network_(network), transport_(std::move(transport)), server_(server), options_(options) {}

std::uint32_t ExplicitClient::submit(ExplicitRequest request) {
  request.request_id = next_id_++;
  if (next_id_ == 0) {
    next_id_ = 1;
  }
  const Bytes bytes = encode_message(request);
  outstanding_[request.request_id] = network_.now();
  transport_->send(server_, bytes);
  return request.request_id;
}

void ExplicitClient::handle(const net::Datagram& datagram) {
  Message message;
  try {
    message = decode_message(datagram.payload);
  } catch (const DecodeError&) {
    ++unmatched_;
    return;
  }
  auto* response = std::get_if<ExplicitResponse>(&message);
  if (response == nullptr) {
    ++unmatched_;
    return;
  }
  auto it = outstanding_.find(response->request_id);
  if (it == outstanding_.end()) {
    ++unmatched_;
    return;
  }
  const Duration latency = network_.now() - it->second;
  completed_[response->request_id] = Completion{std::move(*response), latency};
  outstanding_.erase(it);
}

void ExplicitClient::pump() {
  while (auto datagram = transport_->try_receive()) {
    handle(*datagram);
  }
}

std::optional<ExplicitClient::Completion> ExplicitClient::take(std::uint32_t request_id) {
  auto it = completed_.find(request_id);
  if (it == completed_.end()) {
    return std::nullopt;
  }
  Completion c = std::move(it->second);
  completed_.erase(it);
  return c;
}

ExplicitClient::Completion ExplicitClient::await(std::uint32_t request_id, Instant deadline) {
  while (true) {
    if (auto c = take(request_id)) {
      last_latency_ = c->latency;
      return std::move(*c);
    }
    if (outstanding_.count(request_id) == 0) {
      throw Error("CIP client: request " + std::to_string(request_id) + " is not outstanding");
    }
    auto datagram = transport_->receive(deadline);
    if (!datagram) {
      outstanding_.erase(request_id);
      throw TimeoutError("CIP response for request " + std::to_string(request_id) + " timed out");
    }
    handle(*datagram);
  }
}

void ExplicitClient::forget(std::uint32_t request_id) {
  outstanding_.erase(request_id);
  completed_.erase(request_id);
}

void ExplicitClient::check(const ExplicitResponse& response, std::string_view tag) {
  switch (response.status) {
    case Status::Ok:
      return;
    case Status::UnknownTag:
      throw NameError("unknown tag '" + std::string(tag) + "'");
    case Status::DirectionViolation:
      throw DirectionError("tag '" + std::string(tag) + "' does not accept writes");
    default:
      throw RemoteError(static_cast<std::uint16_t>(response.status),
                        std::string("CIP request failed: ") + to_string(response.status));
  }
}

double ExplicitClient::read(std::string_view tag) {
  const auto id = submit(ExplicitRequest::read(std::string(tag)));
  auto c = await(id, network_.now() + options_.timeout);
  check(c.response, tag);
  return c.response.value();
}

void ExplicitClient::write(std::string_view tag, double value) {
  const auto id = submit(ExplicitRequest::write(std::string(tag), value));
  auto c = await(id, network_.now() + options_.timeout);
  check(c.response, tag);
}

std::vector<TagInfo> ExplicitClient::list_tags() {
  const auto id = submit(ExplicitRequest::list());
  Completion c;
  try {
    c = await(id, network_.now() + options_.timeout);
  } catch (const TimeoutError& e) {
    throw ConnectionError(std::string("tag server unreachable: ") + e.what());
  }
  check(c.response, "");
  return std::move(c.response.tags);
}

}  // namespace plcbench::ciplite

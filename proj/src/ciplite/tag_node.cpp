// SPDX-License-Identifier: Apache-2.0

#include "plcbench/ciplite/tag_node.hpp"

#include "plcbench/common/error.hpp"

namespace plcbench::ciplite {

TagNode::TagNode(std::string name, net::Network& network, std::unique_ptr<net::Transport> transport)
    : name_(std::move(name)), network_(network), transport_(std::move(transport)) {}

TagNode::~TagNode() { stop(); }

void TagNode::add_tag(const std::string& tag, TagDirection direction) {
  std::lock_guard lock(mutex_);
  if (!tags_.emplace(tag, Tag{direction}).second) {
    throw ConfigError("duplicate tag '" + tag + "' on node " + name_);
  }
}

void TagNode::write(std::string_view tag, double value) {
  std::lock_guard lock(mutex_);
  auto it = tags_.find(tag);
  if (it == tags_.end()) {
    throw NameError("unknown tag '" + std::string(tag) + "' on node " + name_);
  }
  if (it->second.direction != TagDirection::OutputPublish) {
    throw DirectionError("tag '" + std::string(tag) + "' is fed by a link and cannot be written");
  }
  it->second.value = value;
  it->second.last_update = network_.now();
}

double TagNode::read(std::string_view tag) const {
  std::lock_guard lock(mutex_);
  auto it = tags_.find(tag);
  if (it == tags_.end()) {
    throw NameError("unknown tag '" + std::string(tag) + "' on node " + name_);
  }
  return it->second.value;
}

void TagNode::start() {
  if (running_) {
    return;
  }
  running_ = true;
  network_.attach(*this, {transport_.get()});
}

void TagNode::stop() {
  if (!running_) {
    return;
  }
  network_.detach(*this);
  running_ = false;
}

std::optional<TagDirection> TagNode::tag_direction(std::string_view tag) const {
  std::lock_guard lock(mutex_);
  auto it = tags_.find(tag);
  if (it == tags_.end()) {
    return std::nullopt;
  }
  return it->second.direction;
}

void TagNode::add_production(Production production) {
  std::lock_guard lock(mutex_);
  links_.add_production(std::move(production), network_.now());
}

void TagNode::add_consumption(std::uint32_t connection_id, std::string tag) {
  std::lock_guard lock(mutex_);
  links_.add_consumption(connection_id, std::move(tag));
}

void TagNode::remove_connection(std::uint32_t connection_id) {
  std::lock_guard lock(mutex_);
  links_.remove(connection_id);
}

bool TagNode::has_connection(std::uint32_t connection_id) const {
  std::lock_guard lock(mutex_);
  return links_.has(connection_id);
}

std::optional<ConsumedValue> TagNode::consumed(std::uint32_t connection_id) const {
  std::lock_guard lock(mutex_);
  return links_.consumed(connection_id);
}

std::optional<Instant> TagNode::next_wakeup() const {
  std::lock_guard lock(mutex_);
  return links_.next_due();
}

void TagNode::wake(Instant now) {
  std::vector<LinkTable::Outgoing> outgoing;
  {
    std::lock_guard lock(mutex_);
    while (auto d = transport_->try_receive()) {
      Message m;
      try {
        m = decode_message(d->payload);
      } catch (const DecodeError&) {
        continue;
      }
      if (const auto* link = std::get_if<LinkMessage>(&m)) {
        if (auto update = links_.accept(*link, now)) {
          auto it = tags_.find(update->first);
          if (it != tags_.end()) {
            it->second.value = update->second;
            it->second.last_update = now;
          }
        }
      }
    }
    outgoing = links_.produce_due(now, [this](const std::string& tag) {
      auto it = tags_.find(tag);
      return it == tags_.end() ? 0.0 : it->second.value;
    });
  }
  for (const auto& o : outgoing) {
    transport_->send(o.target, o.payload);
  }
}

std::uint64_t TagNode::dropped_stale() const {
  std::lock_guard lock(mutex_);
  return links_.dropped_stale();
}

std::uint64_t TagNode::dropped_unknown() const {
  std::lock_guard lock(mutex_);
  return links_.dropped_unknown();
}

LinkedClient::LinkedClient(net::Network& network, TagNode& node, std::string output_tag,
                           std::string input_tag, Duration timeout)
    : network_(network),
      node_(node),
      output_tag_(std::move(output_tag)),
      input_tag_(std::move(input_tag)),
      timeout_(timeout) {}

double LinkedClient::cycle(double value) {
  const Instant start = network_.now();
  node_.write(output_tag_, value);
  const bool arrived = network_.wait_until(
      [&] { return same_bits(node_.read(input_tag_), value); }, start + timeout_);
  if (!arrived) {
    throw TimeoutError("linked cycle: value did not come back through the links");
  }
  last_latency_ = network_.now() - start;
  return node_.read(input_tag_);
}

}  // namespace plcbench::ciplite

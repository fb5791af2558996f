// SPDX-License-Identifier: Apache-2.0

#include "plcbench/ciplite/link.hpp"

#include <algorithm>

#include "plcbench/common/error.hpp"

namespace plcbench::ciplite {

void LinkTable::add_production(Production production, Instant first_due) {
  const auto id = production.connection_id;
  producers_[id] = ProducerState{std::move(production), 0, first_due};
}

void LinkTable::add_consumption(std::uint32_t connection_id, std::string tag) {
  consumers_[connection_id] = ConsumerState{std::move(tag), std::nullopt};
}

void LinkTable::remove(std::uint32_t connection_id) {
  producers_.erase(connection_id);
  consumers_.erase(connection_id);
}

bool LinkTable::has(std::uint32_t connection_id) const {
  return producers_.count(connection_id) != 0 || consumers_.count(connection_id) != 0;
}

std::optional<Instant> LinkTable::next_due() const {
  std::optional<Instant> next;
  for (const auto& [id, p] : producers_) {
    if (!next || p.next_due < *next) {
      next = p.next_due;
    }
  }
  return next;
}

std::optional<std::pair<std::string, double>> LinkTable::accept(const LinkMessage& message, Instant now) {
  auto it = consumers_.find(message.connection_id);
  if (it == consumers_.end()) {
    ++dropped_unknown_;
    return std::nullopt;
  }
  auto& state = it->second;
  if (state.last && message.sequence <= state.last->sequence) {
    ++dropped_stale_;
    return std::nullopt;
  }
  state.last = ConsumedValue{message.value(), message.sequence, message.produced_at(), now};
  return std::make_pair(state.tag, message.value());
}

std::optional<ConsumedValue> LinkTable::consumed(std::uint32_t connection_id) const {
  auto it = consumers_.find(connection_id);
  if (it == consumers_.end()) {
    return std::nullopt;
  }
  return it->second.last;
}

LinkedValue linked_read(const LinkHandle& handle, std::size_t consumer_index) {
  if (consumer_index >= handle.consumers().size()) {
    throw Error("link " + std::to_string(handle.connection_id()) + " has no consumer #" +
                std::to_string(consumer_index));
  }
  auto copy = handle.consumers()[consumer_index]->consumed(handle.connection_id());
  if (!copy) {
    throw NotReadyError("link " + std::to_string(handle.connection_id()) + " has not delivered yet");
  }
  return LinkedValue{copy->value, handle.network().now() - copy->produced_at};
}

void LinkConfigurator::add_node(LinkNode& node) {
  const auto name = node.node_name();
  if (nodes_.count(name) != 0) {
    throw ConfigError("duplicate link node '" + name + "'");
  }
  nodes_[name] = &node;
}

LinkNode& LinkConfigurator::node(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) {
    throw ConfigError("unknown link node '" + name + "'");
  }
  return *it->second;
}

LinkHandle LinkConfigurator::create_link(const TagLink& link) {
  if (link.rpi <= Duration::zero()) {
    throw ConfigError("link RPI must be positive");
  }
  if (link.consumers.empty()) {
    throw ConfigError("link " + std::to_string(link.connection_id) + " has no consumers");
  }
  if (links_.count(link.connection_id) != 0) {
    throw ConfigError("duplicate connection id " + std::to_string(link.connection_id));
  }
  LinkNode& producer = node(link.producer.node);
  if (producer.has_connection(link.connection_id)) {
    throw ConfigError("duplicate connection id " + std::to_string(link.connection_id));
  }
  if (producer.tag_direction(link.producer.tag) != TagDirection::OutputPublish) {
    throw DirectionError("producer tag " + link.producer.node + "." + link.producer.tag +
                         " is not an output-published tag");
  }

  std::vector<LinkNode*> consumers;
  Production production{link.connection_id, link.producer.tag, {}, link.rpi};
  for (const auto& c : link.consumers) {
    LinkNode& consumer = node(c.node);
    if (consumer.has_connection(link.connection_id)) {
      throw ConfigError("duplicate connection id " + std::to_string(link.connection_id));
    }
    if (consumer.tag_direction(c.tag) != TagDirection::InputPublish) {
      throw DirectionError("consumer tag " + c.node + "." + c.tag + " is not an input-published tag");
    }
    consumers.push_back(&consumer);
    production.targets.push_back(consumer.link_address());
  }

  for (std::size_t i = 0; i < consumers.size(); ++i) {
    consumers[i]->add_consumption(link.connection_id, link.consumers[i].tag);
  }
  producer.add_production(std::move(production));

  std::vector<LinkNode*> involved = consumers;
  involved.push_back(&producer);
  links_[link.connection_id] = std::move(involved);
  return LinkHandle(network_, link.connection_id, std::move(consumers));
}

void LinkConfigurator::remove_link(std::uint32_t connection_id) {
  auto it = links_.find(connection_id);
  if (it == links_.end()) {
    return;
  }
  for (LinkNode* n : it->second) {
    n->remove_connection(connection_id);
  }
  links_.erase(it);
}

}  // namespace plcbench::ciplite

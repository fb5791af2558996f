// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "plcbench/ciplite/messages.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::ciplite {

struct Production {
  std::uint32_t connection_id = 0;
  std::string tag;
  std::vector<net::Address> targets;
  Duration rpi = std::chrono::milliseconds{1};
};

struct ConsumedValue {
  double value = 0.0;
  std::uint32_t sequence = 0;
  Instant produced_at{};
  Instant received_at{};
};

/// Producer/consumer bookkeeping shared by the PLC emulator and PC-side
/// nodes. Not synchronized; the owner serializes access.
class LinkTable {
 public:
  void add_production(Production production, Instant first_due);
  void add_consumption(std::uint32_t connection_id, std::string tag);
  void remove(std::uint32_t connection_id);
  [[nodiscard]] bool has(std::uint32_t connection_id) const;

  /// Earliest instant at which a production is due.
  [[nodiscard]] std::optional<Instant> next_due() const;

  struct Outgoing {
    net::Address target;
    Bytes payload;
  };
  /// Emits one message per target for every production whose RPI elapsed.
  /// `value_of(tag)` supplies the current producer value.
  template <typename ValueOf>
  std::vector<Outgoing> produce_due(Instant now, ValueOf&& value_of);

  /// Applies a received link message. Returns the consumer tag and value
  /// when the connection is consumed here and the sequence is fresh.
  std::optional<std::pair<std::string, double>> accept(const LinkMessage& message, Instant now);

  [[nodiscard]] std::optional<ConsumedValue> consumed(std::uint32_t connection_id) const;

  [[nodiscard]] std::uint64_t produced_count() const { return produced_; }
  [[nodiscard]] std::uint64_t dropped_stale() const { return dropped_stale_; }
  [[nodiscard]] std::uint64_t dropped_unknown() const { return dropped_unknown_; }

 private:
  struct ProducerState {
    Production config;
    std::uint32_t sequence = 0;
    Instant next_due{};
  };
  struct ConsumerState {
    std::string tag;
    std::optional<ConsumedValue> last;
  };

  std::map<std::uint32_t, ProducerState> producers_;
  std::map<std::uint32_t, ConsumerState> consumers_;
  std::uint64_t produced_ = 0;
  std::uint64_t dropped_stale_ = 0;
  std::uint64_t dropped_unknown_ = 0;
};

template <typename ValueOf>
std::vector<LinkTable::Outgoing> LinkTable::produce_due(Instant now, ValueOf&& value_of) {
  std::vector<Outgoing> out;
  for (auto& [id, p] : producers_) {
    if (now < p.next_due) {
      continue;
    }
    LinkMessage msg{id, ++p.sequence, bits_of(value_of(p.config.tag)), now.time_since_epoch().count()};
    const Bytes payload = encode_message(msg);
    for (const auto& target : p.config.targets) {
      out.push_back(Outgoing{target, payload});
    }
    ++produced_;
    // Stay on the RPI grid; skip slots that were missed entirely.
    while (p.next_due <= now) {
      p.next_due += p.config.rpi;
    }
  }
  return out;
}

/// Anything that can own tags and take part in tag data links.
class LinkNode {
 public:
  virtual ~LinkNode() = default;

  [[nodiscard]] virtual std::string node_name() const = 0;
  [[nodiscard]] virtual net::Address link_address() const = 0;
  [[nodiscard]] virtual std::optional<TagDirection> tag_direction(std::string_view tag) const = 0;

  virtual void add_production(Production production) = 0;
  virtual void add_consumption(std::uint32_t connection_id, std::string tag) = 0;
  virtual void remove_connection(std::uint32_t connection_id) = 0;
  [[nodiscard]] virtual bool has_connection(std::uint32_t connection_id) const = 0;
  [[nodiscard]] virtual std::optional<ConsumedValue> consumed(std::uint32_t connection_id) const = 0;
};

struct LinkEndpoint {
  std::string node;
  std::string tag;
};

struct TagLink {
  std::uint32_t connection_id = 0;
  LinkEndpoint producer;
  std::vector<LinkEndpoint> consumers;
  Duration rpi = std::chrono::milliseconds{1};
};

class LinkHandle {
 public:
  LinkHandle(const net::Network& network, std::uint32_t connection_id, std::vector<LinkNode*> consumers)
      : network_(&network), connection_id_(connection_id), consumers_(std::move(consumers)) {}

  [[nodiscard]] std::uint32_t connection_id() const { return connection_id_; }
  [[nodiscard]] const std::vector<LinkNode*>& consumers() const { return consumers_; }
  [[nodiscard]] const net::Network& network() const { return *network_; }

 private:
  const net::Network* network_;
  std::uint32_t connection_id_;
  std::vector<LinkNode*> consumers_;
};

struct LinkedValue {
  double value = 0.0;
  Duration staleness{0};
};

/// Local copy held by one consumer of the link; never touches the network.
/// Throws NotReadyError until the first message arrived.
LinkedValue linked_read(const LinkHandle& handle, std::size_t consumer_index = 0);

/// Wires producers to consumers across registered nodes, the way a network
/// configurator tool would.
class LinkConfigurator {
 public:
  explicit LinkConfigurator(const net::Network& network) : network_(network) {}

  void add_node(LinkNode& node);
  LinkHandle create_link(const TagLink& link);
  void remove_link(std::uint32_t connection_id);

 private:
  LinkNode& node(const std::string& name) const;

  const net::Network& network_;
  std::map<std::string, LinkNode*> nodes_;
  std::map<std::uint32_t, std::vector<LinkNode*>> links_;
};

}  // namespace plcbench::ciplite

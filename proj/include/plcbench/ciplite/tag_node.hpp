// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "plcbench/ciplite/link.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::ciplite {

/// PC-side tag server: holds local tags and keeps them current through tag
/// data links. Local reads/writes come from the application thread while the
/// link receive/produce path runs as an actor; tag values are swapped under a
/// lock so readers never see a torn value.
class TagNode final : public LinkNode, public net::Actor {
 public:
  TagNode(std::string name, net::Network& network, std::unique_ptr<net::Transport> transport);
  ~TagNode() override;

  TagNode(const TagNode&) = delete;
  TagNode& operator=(const TagNode&) = delete;

  void add_tag(const std::string& tag, TagDirection direction);

  /// Application write; only output-published tags are written locally.
  void write(std::string_view tag, double value);
  [[nodiscard]] double read(std::string_view tag) const;

  void start();
  void stop();

  // LinkNode
  [[nodiscard]] std::string node_name() const override { return name_; }
  [[nodiscard]] net::Address link_address() const override { return transport_->local_address(); }
  [[nodiscard]] std::optional<TagDirection> tag_direction(std::string_view tag) const override;
  void add_production(Production production) override;
  void add_consumption(std::uint32_t connection_id, std::string tag) override;
  void remove_connection(std::uint32_t connection_id) override;
  [[nodiscard]] bool has_connection(std::uint32_t connection_id) const override;
  [[nodiscard]] std::optional<ConsumedValue> consumed(std::uint32_t connection_id) const override;

  // Actor
  [[nodiscard]] std::optional<Instant> next_wakeup() const override;
  void wake(Instant now) override;

  [[nodiscard]] std::uint64_t dropped_stale() const;
  [[nodiscard]] std::uint64_t dropped_unknown() const;

 private:
  struct Tag {
    TagDirection direction;
    double value = 0.0;
    Instant last_update{};
  };

  std::string name_;
  net::Network& network_;
  std::unique_ptr<net::Transport> transport_;
  mutable std::mutex mutex_;
  std::map<std::string, Tag, std::less<>> tags_;
  LinkTable links_;
  bool running_ = false;
};

/// Write/read cycle through a pair of tag data links: write the PC output
/// tag, then wait until the PC input tag shows the same bit pattern.
class LinkedClient {
 public:
  LinkedClient(net::Network& network, TagNode& node, std::string output_tag, std::string input_tag,
               Duration timeout = std::chrono::milliseconds{500});

  double cycle(double value);
  [[nodiscard]] Duration last_latency() const { return last_latency_; }

 private:
  net::Network& network_;
  TagNode& node_;
  std::string output_tag_;
  std::string input_tag_;
  Duration timeout_;
  Duration last_latency_{0};
};

}  // namespace plcbench::ciplite

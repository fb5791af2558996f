// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "plcbench/net/network.hpp"

namespace plcbench::net {

struct SimChannelConfig {
  Duration one_way_delay = std::chrono::milliseconds{1};
  /// Extra delay drawn uniformly from [0, jitter] per datagram.
  Duration jitter{0};
  /// When true, datagrams between one sender/receiver pair never overtake
  /// each other even with jitter. Turn off to inject reordering.
  bool preserve_order = true;
  /// Added to every datagram sent from a port bound with that service.
  std::map<Service, Duration> server_overhead;
  std::uint64_t seed = 1;
};

class SimTransport;

/// Deterministic discrete-event network. Time only moves inside
/// wait_until(); at equal timestamps, deliveries happen before actor wakes,
/// so a datagram arriving exactly at a scan boundary is seen by that scan.
class SimNetwork final : public Network {
 public:
  explicit SimNetwork(SimChannelConfig config = {});
  ~SimNetwork() override;

  SimNetwork(const SimNetwork&) = delete;
  SimNetwork& operator=(const SimNetwork&) = delete;

  [[nodiscard]] bool simulated() const override { return true; }
  [[nodiscard]] Instant now() const override { return now_; }

  std::unique_ptr<Transport> bind(std::uint16_t port, Service service = Service::Client) override;
  bool wait_until(const std::function<bool()>& ready, Instant deadline) override;
  void attach(Actor& actor, std::vector<Transport*> watched) override;
  void detach(Actor& actor) override;

  [[nodiscard]] const SimChannelConfig& channel() const { return config_; }
  [[nodiscard]] std::size_t in_flight() const { return queue_.size(); }
  [[nodiscard]] std::uint64_t delivered() const { return delivered_; }
  [[nodiscard]] std::uint64_t dropped() const { return dropped_; }

 private:
  friend class SimTransport;

  struct InFlight {
    Instant arrival;
    std::uint64_t seq;
    Datagram datagram;
  };
  struct LaterFirst {
    bool operator()(const InFlight& a, const InFlight& b) const {
      return a.arrival != b.arrival ? a.arrival > b.arrival : a.seq > b.seq;
    }
  };
  struct PortState {
    Service service;
    std::deque<Datagram> inbox;
  };
  struct ActorEntry {
    Actor* actor;
    std::set<std::uint16_t> watched;
    bool notified = false;
  };

  void enqueue(const Address& from, const Address& to, ByteView payload);
  void deliver_due();
  void unbind(std::uint16_t port);
  std::deque<Datagram>* inbox(std::uint16_t port);
  [[nodiscard]] std::optional<Instant> next_event() const;
  void step(Instant t);

  SimChannelConfig config_;
  Instant now_ = kEpoch;
  std::mt19937_64 rng_;
  std::uint64_t seq_ = 0;
  std::priority_queue<InFlight, std::vector<InFlight>, LaterFirst> queue_;
  std::map<std::uint16_t, PortState> ports_;
  std::map<std::pair<Address, Address>, Instant> last_arrival_;
  std::vector<ActorEntry> actors_;
  std::uint16_t next_ephemeral_ = 50000;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  bool stepping_ = false;
};

}  // namespace plcbench::net

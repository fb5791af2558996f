// SPDX-License-Identifier: Apache-2.0

#include "plcbench/net/sim_network.hpp"

#include <algorithm>
#include <stdexcept>

#include "plcbench/common/error.hpp"

namespace plcbench::net {

class SimTransport final : public Transport {
 public:
  SimTransport(SimNetwork& network, std::uint16_t port) : network_(network), port_(port) {}
  ~SimTransport() override { network_.unbind(port_); }

  [[nodiscard]] Address local_address() const override { return Address::loopback(port_); }

  void send(const Address& to, ByteView payload) override {
    network_.enqueue(local_address(), to, payload);
  }

  std::optional<Datagram> try_receive() override {
    network_.deliver_due();
    return pop();
  }

  std::optional<Datagram> receive(Instant deadline) override {
    auto* box = network_.inbox(port_);
    network_.wait_until([box] { return !box->empty(); }, deadline);
    return pop();
  }

 private:
  std::optional<Datagram> pop() {
    auto* box = network_.inbox(port_);
    if (box->empty()) {
      return std::nullopt;
    }
    Datagram d = std::move(box->front());
    box->pop_front();
    return d;
  }

  SimNetwork& network_;
  std::uint16_t port_;
};

SimNetwork::SimNetwork(SimChannelConfig config) : config_(std::move(config)), rng_(config_.seed) {
  if (config_.one_way_delay < Duration::zero() || config_.jitter < Duration::zero()) {
    throw ConfigError("simulated channel delays must be non-negative");
  }
}

SimNetwork::~SimNetwork() = default;

std::unique_ptr<Transport> SimNetwork::bind(std::uint16_t port, Service service) {
  if (port == 0) {
    while (ports_.count(next_ephemeral_) != 0) {
      ++next_ephemeral_;
    }
    port = next_ephemeral_++;
  }
  if (ports_.count(port) != 0) {
    throw StartupError("port " + std::to_string(port) + " already bound");
  }
  ports_.emplace(port, PortState{service, {}});
  return std::make_unique<SimTransport>(*this, port);
}

void SimNetwork::unbind(std::uint16_t port) {
  ports_.erase(port);
  for (auto& entry : actors_) {
    entry.watched.erase(port);
  }
}

std::deque<Datagram>* SimNetwork::inbox(std::uint16_t port) {
  auto it = ports_.find(port);
  if (it == ports_.end()) {
    throw std::logic_error("sim network: transport outlived its port binding");
  }
  return &it->second.inbox;
}

void SimNetwork::enqueue(const Address& from, const Address& to, ByteView payload) {
  Duration delay = config_.one_way_delay;
  if (config_.jitter > Duration::zero()) {
    std::uniform_int_distribution<Duration::rep> dist(0, config_.jitter.count());
    delay += Duration{dist(rng_)};
  }
  if (auto src = ports_.find(from.port); src != ports_.end()) {
    if (auto oh = config_.server_overhead.find(src->second.service); oh != config_.server_overhead.end()) {
      delay += oh->second;
    }
  }
  Instant arrival = now_ + delay;
  if (config_.preserve_order) {
    auto& last = last_arrival_[{from, to}];
    arrival = std::max(arrival, last);
    last = arrival;
  }
  queue_.push(InFlight{arrival, seq_++, Datagram{from, to, Bytes(payload.begin(), payload.end()), arrival}});
}

void SimNetwork::deliver_due() {
  while (!queue_.empty() && queue_.top().arrival <= now_) {
    // priority_queue::top is const; the copy is cheap next to the event loop.
    Datagram d = queue_.top().datagram;
    queue_.pop();
    auto port = ports_.find(d.to.port);
    if (port == ports_.end()) {
      ++dropped_;
      continue;
    }
    ++delivered_;
    for (auto& entry : actors_) {
      if (entry.watched.count(d.to.port) != 0) {
        entry.notified = true;
      }
    }
    port->second.inbox.push_back(std::move(d));
  }
}

std::optional<Instant> SimNetwork::next_event() const {
  std::optional<Instant> next;
  auto consider = [&next](Instant t) {
    if (!next || t < *next) {
      next = t;
    }
  };
  if (!queue_.empty()) {
    consider(std::max(queue_.top().arrival, now_));
  }
  for (const auto& entry : actors_) {
    if (entry.notified) {
      consider(now_);
    }
    if (auto w = entry.actor->next_wakeup()) {
      consider(std::max(*w, now_));
    }
  }
  return next;
}

void SimNetwork::step(Instant t) {
  constexpr int kMaxRounds = 100000;
  now_ = t;
  stepping_ = true;
  for (int round = 0;; ++round) {
    if (round == kMaxRounds) {
      stepping_ = false;
      throw std::logic_error("sim network: actors did not settle at one timestamp");
    }
    deliver_due();
    std::vector<Actor*> due;
    for (auto& entry : actors_) {
      const auto w = entry.actor->next_wakeup();
      if (entry.notified || (w && *w <= now_)) {
        entry.notified = false;
        due.push_back(entry.actor);
      }
    }
    if (due.empty()) {
      break;
    }
    for (Actor* actor : due) {
      const bool attached = std::any_of(actors_.begin(), actors_.end(),
                                        [actor](const ActorEntry& e) { return e.actor == actor; });
      if (attached) {
        actor->wake(now_);
      }
    }
  }
  stepping_ = false;
}

bool SimNetwork::wait_until(const std::function<bool()>& ready, Instant deadline) {
  if (stepping_) {
    throw std::logic_error("sim network: blocking wait from inside an actor");
  }
  while (true) {
    if (ready()) {
      return true;
    }
    const auto next = next_event();
    if (!next || *next > deadline) {
      if (deadline != Instant::max() && deadline > now_) {
        now_ = deadline;
      }
      return ready();
    }
    step(*next);
  }
}

void SimNetwork::attach(Actor& actor, std::vector<Transport*> watched) {
  ActorEntry entry{&actor, {}, false};
  for (Transport* t : watched) {
    entry.watched.insert(t->local_address().port);
  }
  actors_.push_back(std::move(entry));
}

void SimNetwork::detach(Actor& actor) {
  std::erase_if(actors_, [&actor](const ActorEntry& e) { return e.actor == &actor; });
}

}  // namespace plcbench::net

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "plcbench/net/network.hpp"

namespace plcbench::net {

/// Real UDP sockets and the monotonic clock. Every attached actor gets a
/// dedicated thread that sleeps until its next wakeup or until one of its
/// watched sockets becomes readable.
class UdpNetwork final : public Network {
 public:
  explicit UdpNetwork(Address bind_host = Address::loopback(0));
  ~UdpNetwork() override;

  [[nodiscard]] bool simulated() const override { return false; }
  [[nodiscard]] Instant now() const override;

  std::unique_ptr<Transport> bind(std::uint16_t port, Service service = Service::Client) override;
  bool wait_until(const std::function<bool()>& ready, Instant deadline) override;
  void attach(Actor& actor, std::vector<Transport*> watched) override;
  void detach(Actor& actor) override;

 private:
  struct Runner {
    std::atomic<bool> stop{false};
    std::thread thread;
  };

  Address bind_host_;
  std::mutex mutex_;
  std::map<Actor*, std::unique_ptr<Runner>> runners_;
};

}  // namespace plcbench::net

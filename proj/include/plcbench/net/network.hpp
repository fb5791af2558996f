// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plcbench/common/bytes.hpp"
#include "plcbench/common/time.hpp"

namespace plcbench::net {

struct Address {
  std::uint32_t host = 0x7F000001;  // 127.0.0.1
  std::uint16_t port = 0;

  static Address loopback(std::uint16_t port) { return Address{0x7F000001, port}; }
  /// Parses "a.b.c.d" or "a.b.c.d:port".
  static Address parse(const std::string& text, std::uint16_t default_port = 0);

  [[nodiscard]] std::string to_string() const;
  auto operator<=>(const Address&) const = default;
};

struct Datagram {
  Address from;
  Address to;
  Bytes payload;
  Instant arrival{};
};

/// Which server role a bound port plays. Simulated channels use it to apply
/// per-protocol server overhead; real sockets ignore it.
enum class Service { Client, Fins, Cip, RawEcho };

/// One bound datagram endpoint.
class Transport {
 public:
  virtual ~Transport() = default;

  [[nodiscard]] virtual Address local_address() const = 0;
  virtual void send(const Address& to, ByteView payload) = 0;
  /// Non-blocking; returns an already-arrived datagram if there is one.
  virtual std::optional<Datagram> try_receive() = 0;
  /// Blocks (or, when simulated, advances the clock) until a datagram
  /// arrives or `deadline` passes.
  virtual std::optional<Datagram> receive(Instant deadline) = 0;
  /// Socket descriptor for real transports, -1 otherwise.
  [[nodiscard]] virtual int native_handle() const { return -1; }
};

/// Something driven by time and by datagrams on its watched transports:
/// the emulator scan loop, a tag-link node, a gateway poller.
class Actor {
 public:
  virtual ~Actor() = default;
  [[nodiscard]] virtual std::optional<Instant> next_wakeup() const = 0;
  /// Called when next_wakeup() is reached or a watched transport has data.
  virtual void wake(Instant now) = 0;
};

/// Execution environment shared by every component: a clock, port binding,
/// actor scheduling, and blocking waits for foreground callers.
class Network {
 public:
  virtual ~Network() = default;

  [[nodiscard]] virtual bool simulated() const = 0;
  [[nodiscard]] virtual Instant now() const = 0;

  /// Port 0 picks a free port.
  virtual std::unique_ptr<Transport> bind(std::uint16_t port, Service service = Service::Client) = 0;

  /// Blocks until `ready()` holds or `deadline` passes; returns the final
  /// value of `ready()`. A simulated network runs its event loop meanwhile.
  virtual bool wait_until(const std::function<bool()>& ready, Instant deadline) = 0;

  void sleep_until(Instant t) {
    wait_until([] { return false; }, t);
  }
  void sleep_for(Duration d) { sleep_until(now() + d); }

  /// Starts scheduling `actor`. Real networks give each actor its own thread.
  virtual void attach(Actor& actor, std::vector<Transport*> watched) = 0;
  /// Stops scheduling `actor`; after return, wake() is no longer running.
  virtual void detach(Actor& actor) = 0;
};

}  // namespace plcbench::net

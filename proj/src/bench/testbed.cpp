// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/testbed.hpp"

#include <algorithm>

#include "plcbench/ciplite/explicit_client.hpp"
#include "plcbench/ciplite/link.hpp"
#include "plcbench/ciplite/tag_node.hpp"
#include "plcbench/common/error.hpp"
#include "plcbench/fins/client.hpp"
#include "plcbench/net/sim_network.hpp"
#include "plcbench/net/udp_network.hpp"
#include "plcbench/opcgw/gateway.hpp"
#include "plcbench/udplink/client.hpp"

namespace plcbench::bench {

namespace {

constexpr const char* kInput = "CIn";
constexpr const char* kOutput = "COut";

struct Targets {
  net::Address fins;
  net::Address cip;
  net::Address echo;
};

std::uint16_t dm_of(const plcsim::EmulatorSettings& settings, std::string_view name) {
  for (const auto& v : settings.variables) {
    if (v.name == name) {
      return v.dm_address;
    }
  }
  throw ConfigError("variable " + std::string(name) + " is not configured");
}

/// Repeats `read` until it returns `nonce` or the deadline passes.
template <typename Read>
void read_until(net::Network& network, double nonce, double first, Instant deadline, Read&& read) {
  double seen = first;
  while (!same_bits(seen, nonce)) {
    if (network.now() >= deadline) {
      throw TimeoutError("cycle did not observe the written value");
    }
    seen = read();
  }
}

class FinsSession final : public Session {
 public:
  FinsSession(net::Network& network, const plcsim::EmulatorSettings& settings, net::Address server,
              bool pipelined)
      : network_(network),
        client_(network, network.bind(0), server, fins::ClientOptions{settings.timeout, {}}),
        in_dm_(dm_of(settings, kInput)),
        out_dm_(dm_of(settings, kOutput)),
        pipelined_(pipelined),
        period_(settings.scan.task_period),
        timeout_(settings.timeout) {}

  Duration run(Kind kind, double nonce) override {
    const Instant start = network_.now();
    switch (kind) {
      case Kind::Read:
        client_.read(out_dm_);
        break;
      case Kind::Write:
        client_.write(in_dm_, nonce);
        break;
      case Kind::Cycle: {
        double first = 0.0;
        if (pipelined_) {
          first = client_.cycle_pipelined(in_dm_, nonce, out_dm_);
        } else {
          client_.write(in_dm_, nonce);
          first = client_.read(out_dm_);
        }
        read_until(network_, nonce, first, start + timeout_, [this] { return client_.read(out_dm_); });
        break;
      }
    }
    return network_.now() - start;
  }
  [[nodiscard]] Duration phase_period() const override { return period_; }

 private:
  net::Network& network_;
  fins::Client client_;
  std::uint16_t in_dm_;
  std::uint16_t out_dm_;
  bool pipelined_;
  Duration period_;
  Duration timeout_;
};

class CipExplicitSession final : public Session {
 public:
  CipExplicitSession(net::Network& network, const plcsim::EmulatorSettings& settings, net::Address server)
      : network_(network),
        client_(network, network.bind(0), server, ciplite::ExplicitClientOptions{settings.timeout}),
        period_(settings.scan.task_period),
        timeout_(settings.timeout) {}

  Duration run(Kind kind, double nonce) override {
    const Instant start = network_.now();
    switch (kind) {
      case Kind::Read:
        client_.read(kOutput);
        break;
      case Kind::Write:
        client_.write(kInput, nonce);
        break;
      case Kind::Cycle: {
        client_.write(kInput, nonce);
        const double first = client_.read(kOutput);
        read_until(network_, nonce, first, start + timeout_, [this] { return client_.read(kOutput); });
        break;
      }
    }
    return network_.now() - start;
  }
  [[nodiscard]] Duration phase_period() const override { return period_; }

 private:
  net::Network& network_;
  ciplite::ExplicitClient client_;
  Duration period_;
  Duration timeout_;
};

/// PC tag node wired to the emulator by the configured links for as long as
/// the session lives.
class CipLinkedSession final : public Session {
 public:
  CipLinkedSession(net::Network& network, const plcsim::EmulatorSettings& settings, plcsim::Emulator& plc)
      : network_(network),
        pc_("pc", network, network.bind(settings.pc_link_port)),
        configurator_(network),
        client_(network, pc_, kOutput, kInput, settings.timeout),
        period_(std::max(settings.scan.task_period, settings.rpi)) {
    pc_.add_tag(kInput, ciplite::TagDirection::InputPublish);
    pc_.add_tag(kOutput, ciplite::TagDirection::OutputPublish);
    configurator_.add_node(plc);
    configurator_.add_node(pc_);
    for (const auto& link : settings.links) {
      configurator_.create_link(link);
      ids_.push_back(link.connection_id);
      period_ = std::max(period_, link.rpi);
    }
    pc_.start();
  }
  ~CipLinkedSession() override {
    for (auto id : ids_) {
      configurator_.remove_link(id);
    }
    pc_.stop();
  }

  Duration run(Kind kind, double nonce) override {
    if (kind != Kind::Cycle) {
      throw ConfigError("cip-linked only measures cycles");
    }
    const Instant start = network_.now();
    client_.cycle(nonce);
    return network_.now() - start;
  }
  [[nodiscard]] Duration phase_period() const override { return period_; }

 private:
  net::Network& network_;
  ciplite::TagNode pc_;
  ciplite::LinkConfigurator configurator_;
  ciplite::LinkedClient client_;
  Duration period_;
  std::vector<std::uint32_t> ids_;
};

class UdpSession final : public Session {
 public:
  UdpSession(net::Network& network, const plcsim::EmulatorSettings& settings, net::Address server)
      : network_(network),
        client_(network, network.bind(0), server, udplink::ClientOptions{settings.timeout}),
        period_(settings.scan.task_period) {}

  Duration run(Kind kind, double nonce) override {
    const Instant start = network_.now();
    switch (kind) {
      case Kind::Read:
        client_.read();
        break;
      case Kind::Write:
        client_.write(nonce);
        break;
      case Kind::Cycle:
        if (!same_bits(client_.cycle(nonce), nonce)) {
          throw Error("echo differs from the sent value");
        }
        break;
    }
    return network_.now() - start;
  }
  [[nodiscard]] Duration phase_period() const override { return period_; }

 private:
  net::Network& network_;
  udplink::Client client_;
  Duration period_;
};

class OpcSession final : public Session {
 public:
  OpcSession(net::Network& network, const plcsim::EmulatorSettings& settings, net::Address server)
      : network_(network),
        gateway_(network),
        device_(gateway_.add_channel("channel0").add_device(
            opcgw::DeviceConfig{"plc", server, settings.scan_rate, opcgw::ScanMode::RequestAllAtScanRate,
                                settings.timeout})),
        period_(std::max(settings.scan.task_period, settings.scan_rate)) {
    device_.auto_create_items();
    gateway_.start();
  }
  ~OpcSession() override { gateway_.stop(); }

  Duration run(Kind kind, double nonce) override {
    const Instant start = network_.now();
    switch (kind) {
      case Kind::Read:
        device_.read_sync(kOutput);
        break;
      case Kind::Write:
        device_.write_sync(kInput, nonce);
        break;
      case Kind::Cycle:
        device_.cycle(kInput, kOutput, nonce);
        break;
    }
    return network_.now() - start;
  }
  [[nodiscard]] Duration phase_period() const override { return period_; }

 private:
  net::Network& network_;
  opcgw::Gateway gateway_;
  opcgw::Device& device_;
  Duration period_;
};

}  // namespace

Testbed::Testbed(Mode mode, plcsim::EmulatorSettings settings) : mode_(mode), settings_(std::move(settings)) {
  switch (mode_) {
    case Mode::Simulated:
      network_ = std::make_unique<net::SimNetwork>(settings_.channel);
      break;
    case Mode::Loopback:
      network_ = std::make_unique<net::UdpNetwork>(net::Address::parse(settings_.host, 0));
      break;
    case Mode::External:
      network_ = std::make_unique<net::UdpNetwork>(net::Address{0, 0});
      break;
  }
  if (mode_ != Mode::External) {
    emulator_ = std::make_unique<plcsim::Emulator>(settings_.variables, settings_.scan, *network_,
                                                   plcsim::emulator_options(settings_));
    emulator_->start();
  }
}

Testbed::~Testbed() {
  close();
  if (emulator_) {
    emulator_->stop();
  }
}

Session& Testbed::open(Protocol protocol, bool pipelined) {
  close();
  Targets t;
  if (emulator_) {
    t = {emulator_->fins_address(), emulator_->cip_address(), emulator_->echo_address()};
  } else {
    const auto host = net::Address::parse(settings_.host, 0).host;
    t = {{host, settings_.ports.fins}, {host, settings_.ports.cip}, {host, settings_.ports.echo}};
  }
  switch (protocol) {
    case Protocol::Fins:
      session_ = std::make_unique<FinsSession>(*network_, settings_, t.fins, pipelined);
      break;
    case Protocol::CipExplicit:
      session_ = std::make_unique<CipExplicitSession>(*network_, settings_, t.cip);
      break;
    case Protocol::CipLinked:
      if (!emulator_) {
        throw UnsupportedModeError("cip-linked needs the emulator as link peer");
      }
      session_ = std::make_unique<CipLinkedSession>(*network_, settings_, *emulator_);
      break;
    case Protocol::Udp:
      session_ = std::make_unique<UdpSession>(*network_, settings_, t.echo);
      break;
    case Protocol::Opc:
      session_ = std::make_unique<OpcSession>(*network_, settings_, t.cip);
      break;
  }
  return *session_;
}

void Testbed::close() { session_.reset(); }

double Testbed::next_nonce() { return static_cast<double>(++nonce_counter_) + 0.5; }

}  // namespace plcbench::bench

// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "plcbench/ciplite/explicit_client.hpp"
#include "plcbench/common/error.hpp"
#include "plcbench/opcgw/gateway.hpp"
#include "support/generators.hpp"

using namespace plcbench;
using namespace std::chrono_literals;
using opcgw::Quality;
using testing::SimPlc;

namespace {

opcgw::DeviceConfig device_config(const SimPlc& s, Duration scan_rate = 10ms) {
  opcgw::DeviceConfig c;
  c.target = s.plc.cip_address();
  c.scan_rate = scan_rate;
  return c;
}

double mean_ms(const std::vector<Duration>& v) {
  const auto sum = std::accumulate(v.begin(), v.end(), Duration{0});
  return static_cast<double>(sum.count()) / 1e6 / static_cast<double>(v.size());
}

void random_pause(SimPlc& s, testing::Rng& rng, Duration span) {
  s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(span.count()))});
}

}  // namespace

TEST_CASE("auto-created items mirror the published variables") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  const auto items = dev.auto_create_items();
  REQUIRE(items.size() == 2);
  CHECK(items[0].name == "CIn");
  CHECK(items[1].name == "COut");
  for (const auto& i : dev.items()) {
    CHECK(i.quality == Quality::Bad);
    CHECK(i.refresh_epoch == 0);
  }
}

TEST_CASE("a controller without published variables yields no items") {
  net::SimNetwork network(testing::sim_channel());
  plcsim::Emulator plc({{"Hidden", 0.0, plcsim::Publish::None, 0}}, {}, network);
  plc.start();
  opcgw::DeviceConfig c;
  c.target = plc.cip_address();
  opcgw::Device dev(network, c);
  CHECK(dev.auto_create_items().empty());
}

TEST_CASE("an unreachable device is a connection error") {
  net::SimNetwork network(testing::sim_channel());
  opcgw::DeviceConfig c;
  c.target = net::Address::loopback(4);
  c.timeout = 20ms;
  opcgw::Device dev(network, c);
  CHECK_THROWS_AS(dev.auto_create_items(), ConnectionError);
}

TEST_CASE("configuration errors") {
  net::SimNetwork network(testing::sim_channel());
  opcgw::Gateway gw(network);
  auto& ch = gw.add_channel("channel0");
  CHECK(ch.driver() == "ciplite");
  CHECK_THROWS_AS(gw.add_channel("channel0"), ConfigError);
  ch.add_device({});
  CHECK_THROWS_AS(ch.add_device({}), ConfigError);
  opcgw::DeviceConfig zero;
  zero.name = "zero";
  zero.scan_rate = Duration{0};
  CHECK_THROWS_AS(ch.add_device(zero), ConfigError);
  CHECK_THROWS_AS(gw.channel("nope"), NameError);
  CHECK_THROWS_AS(ch.device("nope"), NameError);
  CHECK(ch.device_names() == std::vector<std::string>{"plc"});
}

TEST_CASE("poll_tick refreshes every item and isolates failures") {
  SimPlc s;
  s.plc.start();
  s.plc.set_value("CIn", 2.5);
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  dev.add_item("Deleted");
  CHECK_THROWS_AS(dev.add_item("CIn"), ConfigError);

  const auto report = dev.poll_tick();
  CHECK(report.epoch == 1);
  CHECK(dev.epoch() == 1);
  CHECK(report.failures() == 1);
  CHECK(dev.item("CIn").quality == Quality::Good);
  CHECK(dev.item("CIn").value == 2.5);
  CHECK(dev.item("COut").quality == Quality::Good);
  CHECK(dev.item("COut").refresh_epoch == 1);
  CHECK(dev.item("COut").last_refresh <= s.network.now());
  const auto bad = dev.item("Deleted");
  CHECK(bad.quality == Quality::Bad);
  CHECK(bad.refresh_epoch == 0);
  CHECK_FALSE(report.items.back().error.empty());

  const auto csv = opcgw::poll_reports_csv(dev.recent_reports());
  CHECK(csv.rfind("epoch,started_us,completed_us,overran,item,quality,value,error\n", 0) == 0);
  CHECK(csv.find(",CIn,good,2.5,") != std::string::npos);
  CHECK(csv.find(",Deleted,bad,") != std::string::npos);
}

TEST_CASE("scheduled polls complete exactly one scan rate apart") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  const Instant started = s.network.now();
  dev.start();
  s.network.sleep_for(500ms);
  dev.stop();
  const auto reports = dev.recent_reports();
  REQUIRE(reports.size() >= 49);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i].completed - reports[i - 1].completed == 10ms);
    CHECK(reports[i].epoch == reports[i - 1].epoch + 1);
    CHECK_FALSE(reports[i].overran);
  }
  CHECK(reports.front().started == started);
}

TEST_CASE("property: sync read latency lies in (RTT, scan + RTT] and averages scan/2 + RTT") {
  SimPlc s;
  s.plc.start();
  ciplite::ExplicitClient direct(s.network, s.network.bind(0), s.plc.cip_address());
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  dev.start();
  testing::Rng rng(21);
  std::vector<Duration> opc;
  std::vector<Duration> rtt;
  for (int i = 0; i < 10'000; ++i) {
    random_pause(s, rng, 10ms);
    (void)dev.read_sync("COut");
    opc.push_back(dev.last_latency());
    random_pause(s, rng, 10ms);
    (void)direct.read("COut");
    rtt.push_back(direct.last_latency());
  }
  const auto [min_rtt, max_rtt] = std::minmax_element(rtt.begin(), rtt.end());
  for (const auto l : opc) {
    REQUIRE(l > *min_rtt);
    REQUIRE(l <= 10ms + *max_rtt);
  }
  // Polls read both items back to back, so a poll lasts about one extra scan task.
  const double expected = 5.0 + mean_ms(rtt);
  CHECK(mean_ms(opc) == doctest::Approx(expected).epsilon(0.1));
  CHECK(mean_ms(opc) >= mean_ms(rtt));
}

TEST_CASE("a read issued right after a poll completes waits a full scan") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  dev.start();
  for (int i = 0; i < 20; ++i) {
    (void)dev.read_sync("COut");
    (void)dev.read_sync("COut");
    CHECK(dev.last_latency() == 10ms);
  }
}

TEST_CASE("property: reads are fresh and epochs advance by one") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s, 3ms));
  dev.auto_create_items();
  std::vector<opcgw::PollReport> seen;
  dev.set_poll_observer([&seen](const opcgw::PollReport& r) { seen.push_back(r); });
  dev.start();
  testing::Rng rng(22);
  for (int i = 0; i < 2'000; ++i) {
    random_pause(s, rng, 7ms);
    const Instant call = s.network.now();
    const auto epoch_before = dev.epoch();
    (void)dev.read_sync("CIn");
    const auto it = dev.item("CIn");
    REQUIRE(it.refresh_epoch > epoch_before);
    REQUIRE(it.last_refresh > call);
    REQUIRE(it.last_refresh <= s.network.now());
  }
  dev.stop();
  REQUIRE(!seen.empty());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    REQUIRE(seen[i].epoch == i + 1);
  }
}

TEST_CASE("property: gateway reads are never faster than direct reads") {
  for (const auto scan : {1ms, 2ms, 5ms, 10ms, 20ms}) {
    SimPlc s(testing::sim_channel(1ms, 200us, 9));
    s.plc.start();
    ciplite::ExplicitClient direct(s.network, s.network.bind(0), s.plc.cip_address());
    opcgw::Device dev(s.network, device_config(s, scan));
    dev.auto_create_items();
    dev.start();
    testing::Rng rng(23);
    std::vector<Duration> opc;
    std::vector<Duration> base;
    for (int i = 0; i < 500; ++i) {
      random_pause(s, rng, 25ms);
      (void)dev.read_sync("COut");
      opc.push_back(dev.last_latency());
      random_pause(s, rng, 25ms);
      (void)direct.read("COut");
      base.push_back(direct.last_latency());
    }
    CAPTURE(scan.count());
    CHECK(mean_ms(opc) >= mean_ms(base));
  }
}

TEST_CASE("polls that start late report Uncertain quality") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s, 1ms));
  dev.auto_create_items();
  dev.start();
  s.network.sleep_for(50ms);
  dev.stop();
  std::size_t uncertain = 0;
  for (const auto& r : dev.recent_reports()) {
    for (const auto& i : r.items) {
      REQUIRE(i.quality == (r.overran ? Quality::Uncertain : Quality::Good));
      uncertain += i.quality == Quality::Uncertain ? 1 : 0;
    }
  }
  CHECK(uncertain > 0);
}

TEST_CASE("sync writes bypass polling") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  // Items are still Bad: the write path does not care.
  dev.write_sync("CIn", 5.0);
  CHECK(dev.last_latency() <= 3ms);
  CHECK(dev.poll_tick().failures() == 0);
  CHECK(dev.item("COut").value == 5.0);
  CHECK_THROWS_AS(dev.write_sync("Nope", 1.0), NameError);
  CHECK_THROWS_AS((void)dev.read_sync("Nope"), NameError);
  CHECK_THROWS_AS(dev.write_sync("COut", 1.0), DirectionError);
}

TEST_CASE("sync read times out when no poll runs") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  const Instant call = s.network.now();
  CHECK_THROWS_AS((void)dev.read_sync("COut"), TimeoutError);
  CHECK(s.network.now() - call == 2 * 10ms + 500ms);
}

TEST_CASE("sync read of an item that failed its poll is a quality error") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.add_item("Deleted");
  dev.start();
  CHECK_THROWS_AS((void)dev.read_sync("Deleted"), QualityError);
}

TEST_CASE("async writes return without network time") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  const Instant before = s.network.now();
  auto token = dev.write_async("CIn", 6.0);
  CHECK(s.network.now() == before);
  CHECK(token.status() == opcgw::CompletionToken::State::Pending);
  CHECK(token.wait(s.network.now() + 50ms) == opcgw::CompletionToken::State::Succeeded);
  CHECK(s.plc.value("CIn") == 6.0);

  auto unknown = dev.write_async("Nope", 1.0);
  CHECK(unknown.status() == opcgw::CompletionToken::State::Failed);
  CHECK(unknown.error().find("Nope") != std::string::npos);

  auto rejected = dev.write_async("COut", 1.0);
  CHECK(rejected.wait(s.network.now() + 50ms) == opcgw::CompletionToken::State::Failed);

  // Dropping a pending token is allowed.
  { auto ignored = dev.write_async("CIn", 7.0); }
  s.network.sleep_for(5ms);
  CHECK(s.plc.value("CIn") == 7.0);
}

TEST_CASE("cycle returns the written value") {
  SimPlc s;
  s.plc.start();
  opcgw::Device dev(s.network, device_config(s));
  dev.auto_create_items();
  dev.start();
  CHECK(dev.cycle("CIn", "COut", 11.0) == 11.0);
  CHECK(dev.last_latency() >= 2ms);
  CHECK(dev.last_latency() <= 10ms + 3ms);
}

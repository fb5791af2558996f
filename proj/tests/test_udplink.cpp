// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plcbench/common/error.hpp"
#include "plcbench/udplink/client.hpp"
#include "support/generators.hpp"

using namespace plcbench;
using namespace std::chrono_literals;
using testing::SimPlc;

namespace {

std::unique_ptr<udplink::Client> client_for(SimPlc& s) {
  return std::make_unique<udplink::Client>(s.network, s.network.bind(0), s.plc.echo_address());
}

}  // namespace

TEST_CASE("payload encoding is big-endian IEEE-754") {
  const auto a = udplink::encode_value(1.5);
  CHECK(get_u64(a, 0) == 0x3FF8000000000000ULL);
  const auto b = udplink::encode_value(-0.0);
  CHECK(get_u64(b, 0) == 0x8000000000000000ULL);
  CHECK(udplink::decode_value(a) == 1.5);
  CHECK_THROWS_AS(udplink::decode_value(Bytes(7, 0)), FormatError);
  CHECK_THROWS_AS(udplink::decode_value(Bytes(9, 0)), FormatError);
}

TEST_CASE("send emits exactly one 8-byte datagram") {
  net::SimNetwork network(testing::sim_channel());
  auto server = network.bind(9601, net::Service::RawEcho);
  udplink::Client client(network, network.bind(0), server->local_address());
  client.send(1.5);
  auto d = server->receive(network.now() + 10ms);
  REQUIRE(d);
  CHECK(d->payload == Bytes{0x3F, 0xF8, 0, 0, 0, 0, 0, 0});
  CHECK_FALSE(server->receive(network.now() + 10ms));
}

TEST_CASE("recv: value, timeout, wrong length") {
  net::SimNetwork network(testing::sim_channel());
  auto peer = network.bind(0);
  udplink::Client client(network, network.bind(5555), peer->local_address());
  const auto to_client = net::Address::loopback(5555);

  const auto two = udplink::encode_value(2.0);
  peer->send(to_client, two);
  CHECK(client.recv(10ms) == 2.0);

  const auto before = network.now();
  CHECK_THROWS_AS(client.recv(10ms), TimeoutError);
  CHECK(network.now() - before == 10ms);

  peer->send(to_client, Bytes(7, 0));
  CHECK_THROWS_AS(client.recv(10ms), FormatError);
}

TEST_CASE("cycle, write and read against the echo rungs") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);
  CHECK(client->cycle(8.25) == 8.25);
  // Each received value lands in CIn and is copied to COut.
  client->write(3.5);
  s.network.sleep_for(2ms);
  CHECK(s.plc.value("CIn") == 3.5);
  CHECK(client->read() == 3.5);
}

TEST_CASE("property: echo identity for every non-query bit pattern") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);
  testing::Rng rng(31);
  for (int i = 0; i < 3'000; ++i) {
    const double v = testing::random_double(rng);
    if (udplink::is_query(udplink::encode_value(v))) {
      continue;
    }
    REQUIRE(same_bits(client->cycle(v), v));
  }
}

TEST_CASE("property: cycle latency lies in [2d + T, 2d + 2T]") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);
  testing::Rng rng(32);
  for (int i = 0; i < 3'000; ++i) {
    s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % 1'000'000)});
    const Instant start = s.network.now();
    client->cycle(i + 0.5);
    const auto l = s.network.now() - start;
    REQUIRE(l >= 3ms);
    REQUIRE(l <= 4ms);
  }
}

TEST_CASE("property: echo departs one to two scans after arrival") {
  SimPlc s;
  s.plc.start();
  auto peer = s.network.bind(0);
  testing::Rng rng(33);
  for (int i = 0; i < 2'000; ++i) {
    s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % 2'000'000)});
    const Instant sent = s.network.now();
    peer->send(s.plc.echo_address(), udplink::encode_value(i));
    auto echo = peer->receive(sent + 10ms);
    REQUIRE(echo);
    const Instant arrived_at_plc = sent + 1ms;
    const Instant departed = echo->arrival - 1ms;
    REQUIRE(departed - arrived_at_plc >= 1ms);
    REQUIRE(departed - arrived_at_plc <= 2ms);
  }
}

// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plcbench/common/error.hpp"
#include "plcbench/fins/client.hpp"
#include "plcbench/fins/frame.hpp"
#include "support/generators.hpp"

using namespace plcbench;
using namespace std::chrono_literals;
using testing::SimPlc;

namespace {

fins::Request read_request(std::uint8_t sid, std::uint16_t address, std::uint16_t count) {
  fins::Request r;
  r.header.sid = sid;
  r.command = fins::MemoryAreaRead{fins::kAreaDmWord, address, 0, count};
  return r;
}

std::unique_ptr<fins::Client> client_for(SimPlc& s, fins::ClientOptions options = {}) {
  return std::make_unique<fins::Client>(s.network, s.network.bind(0), s.plc.fins_address(), options);
}

}  // namespace

TEST_CASE("read request layout") {
  const Bytes b = fins::encode_frame(read_request(1, 0, 4));
  REQUIRE(b.size() == 18);
  CHECK(b[0] == 0x80);
  CHECK(b[2] == 0x02);
  CHECK(b[9] == 0x01);
  CHECK(b[10] == 0x01);
  CHECK(b[11] == 0x01);
  const Bytes tail(b.end() - 6, b.end());
  CHECK(tail == Bytes{0x82, 0x00, 0x00, 0x00, 0x00, 0x04});
}

TEST_CASE("write request layout and word count check") {
  const std::uint16_t words[] = {0x1122, 0x3344};
  fins::Request r;
  r.command = fins::MemoryAreaWrite::of(4, words);
  const Bytes b = fins::encode_frame(r);
  REQUIRE(b.size() == 22);
  CHECK(b[11] == 0x02);
  CHECK(get_u16(b, 13) == 4);
  CHECK(get_u16(b, 16) == 2);
  CHECK(get_u16(b, 18) == 0x1122);

  fins::Request bad;
  bad.command = fins::MemoryAreaWrite{fins::kAreaDmWord, 0, 0, 2, {1, 2, 3}};
  CHECK_THROWS_AS(fins::encode_frame(bad), EncodeError);
  bad.command = fins::MemoryAreaRead{fins::kAreaDmWord, 0, 0, 0};
  CHECK_THROWS_AS(fins::encode_frame(bad), EncodeError);
}

TEST_CASE("empty normal response is 14 bytes") {
  fins::Response r;
  r.header.icf = 0xC0;
  r.command_code = fins::kMemoryAreaWrite;
  CHECK(fins::encode_frame(r).size() == 14);
}

TEST_CASE("error response must not carry payload") {
  fins::Response r;
  r.header.icf = 0xC0;
  r.end_code = fins::end_code::kAddressRangeError;
  r.payload = {1};
  CHECK_THROWS_AS(fins::encode_frame(r), EncodeError);
}

TEST_CASE("decode errors are classified") {
  auto kind_of = [](const Bytes& b) {
    try {
      fins::decode_frame(b);
    } catch (const DecodeError& e) {
      return e.kind();
    }
    FAIL("decoded");
    return DecodeError::Kind::InvalidField;
  };
  CHECK(kind_of(Bytes(9, 0)) == DecodeError::Kind::TruncatedHeader);
  Bytes unsupported = fins::encode_frame(read_request(1, 0, 4));
  unsupported[10] = 0x01;
  unsupported[11] = 0x99;
  CHECK(kind_of(unsupported) == DecodeError::Kind::UnsupportedCommand);
  try {
    fins::decode_frame(unsupported);
  } catch (const DecodeError& e) {
    CHECK(std::string(e.what()).find("unsupported command") != std::string::npos);
    CHECK(e.offset() == 10);
  }
  Bytes trailing = fins::encode_frame(read_request(1, 0, 4));
  trailing.push_back(0);
  CHECK(kind_of(trailing) == DecodeError::Kind::TrailingBytes);
  Bytes short_body = fins::encode_frame(read_request(1, 0, 4));
  short_body.pop_back();
  CHECK(kind_of(short_body) == DecodeError::Kind::TruncatedBody);
}

TEST_CASE("property: decode inverts encode") {
  testing::Rng rng(11);
  for (int i = 0; i < 20'000; ++i) {
    const auto frame = testing::random_frame(rng);
    REQUIRE(fins::decode_frame(fins::encode_frame(frame)) == frame);
  }
}

TEST_CASE("property: mutated frames decode or fail with a classified error") {
  testing::Rng rng(12);
  int errors = 0;
  for (int i = 0; i < 5'000; ++i) {
    Bytes b = fins::encode_frame(testing::random_frame(rng));
    switch (rng() % 3) {
      case 0: b.resize(rng() % (b.size() + 1)); break;
      case 1: b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255); break;
      default:
        for (auto n = 1 + rng() % 5; n > 0; --n) b.push_back(static_cast<std::uint8_t>(rng()));
    }
    try {
      const auto f = fins::decode_frame(b);
      REQUIRE(fins::encode_frame(f) == b);
    } catch (const DecodeError&) {
      ++errors;
    }
  }
  CHECK(errors > 0);
}

TEST_CASE("LREAL word image keeps any bit pattern") {
  testing::Rng rng(13);
  for (int i = 0; i < 10'000; ++i) {
    const double v = testing::random_double(rng);
    const auto words = fins::lreal_to_words(v);
    REQUIRE(same_bits(fins::words_to_lreal(words), v));
  }
  const auto w = fins::lreal_to_words(1.5);
  CHECK(w[0] == 0x3FF8);
  CHECK(w[3] == 0x0000);
}

TEST_CASE("client against the emulator") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);

  SUBCASE("fresh COut reads 0.0") { CHECK(client->read(4) == 0.0); }

  SUBCASE("write CIn then read COut after a scan") {
    client->write(0, 7.5);
    s.network.sleep_for(1ms);
    CHECK(client->read(4) == 7.5);
    client->write(0, 3.25);
    CHECK(client->read(4) == 3.25);
  }

  SUBCASE("NaN bit pattern survives write and read") {
    const double nan = double_from_bits(0x7FF4000000000123ULL);
    client->write(0, nan);
    CHECK(same_bits(client->read(0), nan));
    CHECK(same_bits(client->read(4), nan));
  }

  SUBCASE("unmapped address is a remote error") {
    try {
      client->write(100, 1.0);
      FAIL("no error");
    } catch (const RemoteError& e) {
      CHECK(e.code() == fins::end_code::kAddressRangeError);
    }
    CHECK_THROWS_AS(client->read_words(6, 4), RemoteError);
  }

  SUBCASE("pipelined cycle returns the written value") {
    CHECK(client->cycle_pipelined(0, 9.0, 4) == 9.0);
    CHECK(client->outstanding() == 0);
  }
}

TEST_CASE("property: read latency lies in [2 ms, 3 ms] at 1 ms delay and scan") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);
  testing::Rng rng(14);
  for (int i = 0; i < 2'000; ++i) {
    s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % 1'000'000)});
    client->read(4);
    const auto l = client->last_latency();
    REQUIRE(l >= 2ms);
    REQUIRE(l <= 3ms);
  }
}

TEST_CASE("pipelined cycle beats write then read") {
  SimPlc s;
  s.plc.start();
  auto client = client_for(s);
  testing::Rng rng(15);
  Duration pipelined{0};
  Duration sync{0};
  for (int i = 0; i < 500; ++i) {
    const double v = i + 0.5;
    s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % 1'000'000)});
    client->cycle_pipelined(0, v, 4);
    pipelined += client->last_latency();
    s.network.sleep_for(Duration{static_cast<std::int64_t>(rng() % 1'000'000)});
    client->write(0, v + 1000);
    sync += client->last_latency();
    client->read(4);
    sync += client->last_latency();
  }
  CHECK(pipelined < sync);
}

TEST_CASE("responses are matched by sid, not arrival order") {
  net::SimNetwork network(testing::sim_channel());
  auto server = network.bind(9600, net::Service::Fins);
  fins::Client client(network, network.bind(0), server->local_address());

  const auto sid_a = client.submit(fins::MemoryAreaRead{fins::kAreaDmWord, 0, 0, 1});
  const auto sid_b = client.submit(fins::MemoryAreaRead{fins::kAreaDmWord, 4, 0, 1});
  const auto sid_c = client.submit(fins::MemoryAreaRead{fins::kAreaDmWord, 8, 0, 1});
  CHECK(sid_a != sid_b);
  CHECK(client.outstanding() == 3);

  std::vector<net::Datagram> requests;
  while (requests.size() < 3) {
    auto d = server->receive(network.now() + 10ms);
    REQUIRE(d);
    requests.push_back(*d);
  }
  // Answer in reverse order; each payload is the request's address.
  for (auto it = requests.rbegin(); it != requests.rend(); ++it) {
    const auto req = std::get<fins::Request>(fins::decode_frame(it->payload));
    const auto& read = std::get<fins::MemoryAreaRead>(req.command);
    server->send(it->from, fins::encode_frame(fins::Response{req.header.response_header(), fins::kMemoryAreaRead,
                                                             fins::end_code::kNormal, {read.address}}));
  }
  CHECK(client.await(sid_a, network.now() + 10ms).payload == std::vector<std::uint16_t>{0});
  CHECK(client.await(sid_c, network.now() + 10ms).payload == std::vector<std::uint16_t>{8});
  CHECK(client.await(sid_b, network.now() + 10ms).payload == std::vector<std::uint16_t>{4});
  CHECK(client.outstanding() == 0);
  CHECK(client.unmatched_responses() == 0);
}

TEST_CASE("sids skip zero and wrap") {
  net::SimNetwork network(testing::sim_channel());
  auto server = network.bind(9600, net::Service::Fins);
  fins::Client client(network, network.bind(0), server->local_address());
  std::vector<std::uint8_t> seen;
  for (int i = 0; i < 300; ++i) {
    const auto sid = client.submit(fins::MemoryAreaRead{}, true);
    REQUIRE(sid != 0);
    seen.push_back(sid);
  }
  CHECK(seen[0] == 1);
  CHECK(seen[254] == 255);
  CHECK(seen[255] == 1);
}

TEST_CASE("silent server times out") {
  net::SimNetwork network(testing::sim_channel());
  auto server = network.bind(9600, net::Service::Fins);
  fins::ClientOptions options;
  options.timeout = 50ms;
  fins::Client client(network, network.bind(0), server->local_address(), options);
  CHECK_THROWS_AS(client.read(0), TimeoutError);
  CHECK(network.now() == kEpoch + 50ms);
}

// SPDX-License-Identifier: Apache-2.0

#include <arpa/inet.h>

#include <charconv>

#include "plcbench/common/error.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::net {

Address Address::parse(const std::string& text, std::uint16_t default_port) {
  std::string host = text;
  std::uint16_t port = default_port;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    host = text.substr(0, colon);
    const std::string port_text = text.substr(colon + 1);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || value > 0xFFFF) {
      throw ConfigError("invalid port in address '" + text + "'");
    }
    port = static_cast<std::uint16_t>(value);
  }
  if (host == "localhost") {
    host = "127.0.0.1";
  }
  in_addr addr{};
  if (inet_pton(AF_INET, host.c_str(), &addr) != 1) {
    throw ConfigError("invalid IPv4 address '" + text + "'");
  }
  return Address{ntohl(addr.s_addr), port};
}

std::string Address::to_string() const {
  return std::to_string(host >> 24) + "." + std::to_string((host >> 16) & 0xFF) + "." +
         std::to_string((host >> 8) & 0xFF) + "." + std::to_string(host & 0xFF) + ":" +
         std::to_string(port);
}

}  // namespace plcbench::net

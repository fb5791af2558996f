// SPDX-License-Identifier: Apache-2.0

#include "plcbench/plcsim/settings.hpp"

#include <charconv>
#include <limits>

#include "plcbench/common/error.hpp"

namespace plcbench::plcsim {

namespace {

std::uint64_t parse_number(const std::string& text, const std::string& what) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid " + what + " '" + text + "'");
  }
  return out;
}

std::uint16_t port_of(const KeyValueConfig& config, const char* key, std::uint16_t fallback) {
  const auto v = config.get_uint(key, fallback);
  if (v > std::numeric_limits<std::uint16_t>::max()) {
    throw ConfigError(std::string(key) + " out of range");
  }
  return static_cast<std::uint16_t>(v);
}

Duration micros_of(const KeyValueConfig& config, const char* key, Duration fallback) {
  return from_micros(static_cast<std::int64_t>(config.get_uint(key, to_micros(fallback))));
}

ciplite::LinkEndpoint parse_endpoint(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
    throw ConfigError("link endpoint must be NODE.TAG, got '" + text + "'");
  }
  return {text.substr(0, dot), text.substr(dot + 1)};
}

Variable parse_variable(const std::string& line) {
  const auto parts = split(line, ',');
  if (parts.size() != 3) {
    throw ConfigError("variable must be NAME, DM_ADDRESS, PUBLISH: '" + line + "'");
  }
  const auto address = parse_number(trim(parts[1]), "DM address");
  if (address > std::numeric_limits<std::uint16_t>::max()) {
    throw ConfigError("DM address out of range: '" + line + "'");
  }
  Variable v;
  v.name = trim(parts[0]);
  v.dm_address = static_cast<std::uint16_t>(address);
  v.publish = parse_publish(trim(parts[2]));
  return v;
}

CopyRule parse_copy(const std::string& line) {
  const auto arrow = line.find("->");
  if (arrow == std::string::npos) {
    throw ConfigError("copy must be SOURCE -> DESTINATION: '" + line + "'");
  }
  return {trim(line.substr(0, arrow)), trim(line.substr(arrow + 2))};
}

ciplite::TagLink parse_link(const std::string& line) {
  const auto parts = split(line, ',');
  if (parts.size() != 4) {
    throw ConfigError("link must be ID, NODE.TAG, NODE.TAG[|...], RPI_US: '" + line + "'");
  }
  const auto id = parse_number(trim(parts[0]), "connection id");
  if (id > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("connection id out of range: '" + line + "'");
  }
  ciplite::TagLink link;
  link.connection_id = static_cast<std::uint32_t>(id);
  link.producer = parse_endpoint(trim(parts[1]));
  for (const auto& c : split(parts[2], '|')) {
    link.consumers.push_back(parse_endpoint(trim(c)));
  }
  link.rpi = from_micros(static_cast<std::int64_t>(parse_number(trim(parts[3]), "rpi")));
  return link;
}

}  // namespace

std::vector<ciplite::TagLink> EmulatorSettings::default_links(Duration rpi) {
  return {
      ciplite::TagLink{1, {"plc", "COut"}, {{"pc", "CIn"}}, rpi},
      ciplite::TagLink{2, {"pc", "COut"}, {{"plc", "CIn"}}, rpi},
  };
}

EmulatorSettings load_settings(const KeyValueConfig& config) {
  EmulatorSettings s;
  s.scan.task_period = micros_of(config, "task_period_us", s.scan.task_period);
  s.channel.one_way_delay = micros_of(config, "one_way_delay_us", s.channel.one_way_delay);
  s.channel.jitter = micros_of(config, "jitter_us", s.channel.jitter);
  s.channel.seed = config.get_uint("seed", s.channel.seed);
  const std::pair<const char*, net::Service> overheads[] = {{"overhead_us.fins", net::Service::Fins},
                                                          {"overhead_us.cip", net::Service::Cip},
                                                          {"overhead_us.udp", net::Service::RawEcho}};
  for (const auto& [key, service] : overheads) {
    if (config.contains(key)) {
      s.channel.server_overhead[service] = micros_of(config, key, Duration{0});
    }
  }
  s.rpi = micros_of(config, "rpi_us", s.rpi);
  s.scan_rate = micros_of(config, "scan_rate_us", s.scan_rate);
  s.timeout = micros_of(config, "timeout_us", s.timeout);
  s.host = config.get_string("host", s.host);
  s.ports.fins = port_of(config, "fins_port", s.ports.fins);
  s.ports.cip = port_of(config, "cip_port", s.ports.cip);
  s.ports.echo = port_of(config, "echo_port", s.ports.echo);
  s.pc_link_port = port_of(config, "pc_link_port", s.pc_link_port);

  if (s.scan.task_period <= Duration::zero() || s.rpi <= Duration::zero() || s.scan_rate <= Duration::zero() ||
      s.timeout <= Duration::zero()) {
    throw ConfigError("task_period_us, rpi_us, scan_rate_us and timeout_us must be positive");
  }

  if (const auto lines = config.get_all("variable"); !lines.empty()) {
    s.variables.clear();
    for (const auto& line : lines) {
      s.variables.push_back(parse_variable(line));
    }
  }
  if (const auto lines = config.get_all("copy"); !lines.empty()) {
    s.scan.copy_rules.clear();
    for (const auto& line : lines) {
      s.scan.copy_rules.push_back(parse_copy(line));
    }
  }
  if (const auto lines = config.get_all("link"); !lines.empty()) {
    s.links.clear();
    for (const auto& line : lines) {
      s.links.push_back(parse_link(line));
    }
  } else {
    s.links = EmulatorSettings::default_links(s.rpi);
  }
  return s;
}

EmulatorOptions emulator_options(const EmulatorSettings& settings) {
  EmulatorOptions o;
  o.ports = settings.ports;
  return o;
}

}  // namespace plcbench::plcsim

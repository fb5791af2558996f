// SPDX-License-Identifier: Apache-2.0

#include "plcbench/bench/types.hpp"

#include "plcbench/common/error.hpp"

namespace plcbench::bench {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::pair<std::string_view, E> (&table)[N], const char* what) {
  for (const auto& [name, value] : table) {
    if (name == text) {
      return value;
    }
  }
  std::string choices;
  for (const auto& [name, _] : table) {
    choices += (choices.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(text) + "' (expected " + choices + ")");
}

}  // namespace

const char* to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::Fins: return "fins";
    case Protocol::CipExplicit: return "cip";
    case Protocol::CipLinked: return "cip-linked";
    case Protocol::Udp: return "udp";
    case Protocol::Opc: return "opc";
  }
  return "?";
}

const char* to_string(Kind k) noexcept {
  switch (k) {
    case Kind::Read: return "read";
    case Kind::Write: return "write";
    case Kind::Cycle: return "cycle";
  }
  return "?";
}

const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Simulated: return "sim";
    case Mode::Loopback: return "loopback";
    case Mode::External: return "external";
  }
  return "?";
}

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Ok: return "ok";
    case Outcome::Timeout: return "timeout";
    case Outcome::Error: return "error";
  }
  return "?";
}

const char* table_row(Protocol p) noexcept {
  switch (p) {
    case Protocol::Fins: return "FINS";
    case Protocol::CipExplicit:
    case Protocol::CipLinked: return "CIP";
    case Protocol::Udp: return "UDP";
    case Protocol::Opc: return "OPC";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  static constexpr std::pair<std::string_view, Protocol> table[] = {{"fins", Protocol::Fins},
                                                                    {"cip", Protocol::CipExplicit},
                                                                    {"cip-linked", Protocol::CipLinked},
                                                                    {"udp", Protocol::Udp},
                                                                    {"opc", Protocol::Opc}};
  return parse_enum(text, table, "protocol");
}

Kind parse_kind(std::string_view text) {
  static constexpr std::pair<std::string_view, Kind> table[] = {
      {"read", Kind::Read}, {"write", Kind::Write}, {"cycle", Kind::Cycle}};
  return parse_enum(text, table, "kind");
}

Mode parse_mode(std::string_view text) {
  static constexpr std::pair<std::string_view, Mode> table[] = {{"sim", Mode::Simulated},
                                                                {"simulated", Mode::Simulated},
                                                                {"loopback", Mode::Loopback},
                                                                {"external", Mode::External}};
  return parse_enum(text, table, "mode");
}

Outcome parse_outcome(std::string_view text) {
  static constexpr std::pair<std::string_view, Outcome> table[] = {
      {"ok", Outcome::Ok}, {"timeout", Outcome::Timeout}, {"error", Outcome::Error}};
  return parse_enum(text, table, "outcome");
}

void BenchConfig::validate() const {
  if (trials < 1) {
    throw ConfigError("trials must be at least 1");
  }
  if (protocol == Protocol::CipLinked && kind != Kind::Cycle) {
    throw ConfigError("cip-linked only measures cycles; use cip for explicit read and write");
  }
  if (pipelined && !(protocol == Protocol::Fins && kind == Kind::Cycle)) {
    throw ConfigError("pipelining applies to fins cycles only");
  }
  if (protocol == Protocol::CipLinked && mode == Mode::External) {
    throw UnsupportedModeError("cip-linked needs the emulator as link peer");
  }
}

}  // namespace plcbench::bench

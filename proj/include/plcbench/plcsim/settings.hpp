// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "plcbench/ciplite/link.hpp"
#include "plcbench/common/key_value_config.hpp"
#include "plcbench/net/sim_network.hpp"
#include "plcbench/plcsim/emulator.hpp"
#include "plcbench/plcsim/variable.hpp"

namespace plcbench::plcsim {

/// Everything the flat config file can set. Defaults give the two-variable
/// copy fixture on a 1 ms scan with 1 ms one-way delay.
///
/// Keys (durations in integer microseconds):
///   task_period_us, one_way_delay_us, jitter_us, seed
///   overhead_us.fins, overhead_us.cip, overhead_us.udp
///   rpi_us, scan_rate_us, timeout_us
///   host, fins_port, cip_port, echo_port, pc_link_port
///   variable = NAME, DM_ADDRESS, none|input|output     (repeatable)
///   copy = SOURCE -> DESTINATION                       (repeatable)
///   link = ID, NODE.TAG, NODE.TAG[|NODE.TAG...], RPI_US (repeatable)
struct EmulatorSettings {
  std::vector<Variable> variables = two_variable_fixture();
  ScanConfig scan = copy_fixture_scan();
  EmulatorPorts ports;
  net::SimChannelConfig channel;
  std::string host = "127.0.0.1";
  /// Port of the PC-side tag node taking part in links.
  std::uint16_t pc_link_port = 2222;
  Duration rpi = std::chrono::milliseconds{1};
  /// OPC gateway poll period.
  Duration scan_rate = std::chrono::milliseconds{10};
  /// Per-request client timeout.
  Duration timeout = std::chrono::milliseconds{500};
  std::vector<ciplite::TagLink> links = default_links(std::chrono::milliseconds{1});

  /// plc.COut -> pc.CIn (id 1) and pc.COut -> plc.CIn (id 2).
  static std::vector<ciplite::TagLink> default_links(Duration rpi);
};

/// Throws ConfigError on malformed values.
EmulatorSettings load_settings(const KeyValueConfig& config);

EmulatorOptions emulator_options(const EmulatorSettings& settings);

}  // namespace plcbench::plcsim

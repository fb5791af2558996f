// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>

#include "plcbench/ciplite/messages.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::ciplite {

struct ExplicitClientOptions {
  Duration timeout = std::chrono::milliseconds{500};
};

/// Request/response tag access by name. One logical caller; several requests
/// can be in flight, correlated by request id.
class ExplicitClient {
 public:
  ExplicitClient(net::Network& network, std::unique_ptr<net::Transport> transport, net::Address server,
                 ExplicitClientOptions options = {});

  double read(std::string_view tag);
  void write(std::string_view tag, double value);
  std::vector<TagInfo> list_tags();

  struct Completion {
    ExplicitResponse response;
    Duration latency;
  };

  std::uint32_t submit(ExplicitRequest request);
  /// Non-blocking: absorbs whatever responses have already arrived.
  void pump();
  std::optional<Completion> take(std::uint32_t request_id);
  Completion await(std::uint32_t request_id, Instant deadline);
  /// Stop tracking a request; its response is dropped on arrival.
  void forget(std::uint32_t request_id);

  /// Throws the error matching a non-Ok status.
  static void check(const ExplicitResponse& response, std::string_view tag);

  [[nodiscard]] Duration last_latency() const { return last_latency_; }
  [[nodiscard]] net::Transport& transport() { return *transport_; }
  [[nodiscard]] std::uint64_t unmatched_responses() const { return unmatched_; }
  [[nodiscard]] const ExplicitClientOptions& options() const { return options_; }

 private:
  void handle(const net::Datagram& datagram);

  net::Network& network_;
  std::unique_ptr<net::Transport> transport_;
  net::Address server_;
  ExplicitClientOptions options_;
  std::uint32_t next_id_ = 1;
  std::map<std::uint32_t, Instant> outstanding_;
  std::map<std::uint32_t, Completion> completed_;
  Duration last_latency_{0};
  std::uint64_t unmatched_ = 0;
};

}  // namespace plcbench::ciplite

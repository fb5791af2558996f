// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcbench/ciplite/explicit_client.hpp"
#include "plcbench/net/network.hpp"

namespace plcbench::opcgw {

enum class Quality { Good, Uncertain, Bad };

const char* to_string(Quality quality) noexcept;

struct Item {
  std::string name;
  double value = 0.0;
  Quality quality = Quality::Bad;
  Instant last_refresh{};
  /// Poll epoch that last refreshed this item; 0 before the first poll.
  std::uint64_t refresh_epoch = 0;
};

struct ItemResult {
  std::string name;
  Quality quality = Quality::Bad;
  double value = 0.0;
  std::string error;
};

struct PollReport {
  std::uint64_t epoch = 0;
  Instant started{};
  Instant completed{};
  /// Started after its grid slot because the previous poll was still running.
  bool overran = false;
  std::vector<ItemResult> items;

  [[nodiscard]] std::size_t failures() const;
};

/// Header plus one row per item: epoch,started_us,completed_us,overran,item,quality,value,error
std::string poll_reports_csv(const std::vector<PollReport>& reports);

enum class ScanMode { RequestAllAtScanRate };

struct DeviceConfig {
  std::string name = "plc";
  net::Address target = net::Address::loopback(44818);
  Duration scan_rate = std::chrono::milliseconds{10};
  ScanMode scan_mode = ScanMode::RequestAllAtScanRate;
  /// Per-request timeout for both polls and writes.
  Duration timeout = std::chrono::milliseconds{500};
};

/// Completion of an asynchronous write. Ignoring it is allowed.
class CompletionToken {
 public:
  enum class State { Pending, Succeeded, Failed };

  CompletionToken() = default;

  /// Non-blocking; absorbs any response that already arrived.
  State status();
  /// Blocks until completion or `deadline`.
  State wait(Instant deadline);
  /// Failure text once Failed, e.g. the unknown-item message.
  [[nodiscard]] std::string error() const;

  struct Shared;

 private:
  friend class Device;
  explicit CompletionToken(std::shared_ptr<Shared> shared) : shared_(std::move(shared)) {}
  std::shared_ptr<Shared> shared_;
};

/// One PLC endpoint polled every scan_rate. Polls run as a network actor
/// reading every item back to back; client calls run on the caller thread.
class Device final : public net::Actor {
 public:
  Device(net::Network& network, DeviceConfig config);
  ~Device() override;

  Device(const Device&) = delete;
  Device& operator=(const Device&) = delete;

  /// One item per published PLC variable, quality Bad. Replaces any
  /// existing items. Throws ConnectionError when the device does not answer.
  std::vector<Item> auto_create_items();
  void add_item(std::string name);

  /// Runs one complete poll on the caller thread. Not allowed while started.
  PollReport poll_tick();

  /// Polls on the scan_rate grid, first poll immediately.
  void start();
  void stop();
  [[nodiscard]] bool running() const { return running_; }

  /// Waits for a poll that starts after this call, then returns its value.
  /// Throws NameError, TimeoutError (after 2 x scan_rate + timeout) or
  /// QualityError when that poll could not read the item.
  double read_sync(std::string_view item);
  /// Forwarded at once, independent of polling and item quality.
  void write_sync(std::string_view item, double value);
  CompletionToken write_async(std::string_view item, double value);
  /// Async write of `value` to `write_item`, then sync reads of `read_item`
  /// until it shows `value`. The write completion is not processed.
  double cycle(std::string_view write_item, std::string_view read_item, double value);

  [[nodiscard]] const DeviceConfig& config() const { return config_; }
  [[nodiscard]] std::vector<Item> items() const;
  [[nodiscard]] Item item(std::string_view name) const;
  /// Completed polls.
  [[nodiscard]] std::uint64_t epoch() const;
  [[nodiscard]] std::uint64_t polls_started() const;
  [[nodiscard]] Duration last_latency() const { return last_latency_; }

  /// Most recent poll reports, oldest first, bounded to `kReportHistory`.
  [[nodiscard]] std::vector<PollReport> recent_reports() const;
  static constexpr std::size_t kReportHistory = 4096;
  void set_poll_observer(std::function<void(const PollReport&)> observer);

  // Actor
  [[nodiscard]] std::optional<Instant> next_wakeup() const override;
  void wake(Instant now) override;

 private:
  struct Pending {
    std::size_t item;
    std::uint32_t request_id;
  };
  struct InFlight {
    PollReport report;
    Instant deadline{};
    std::vector<Pending> pending;
    std::map<std::size_t, ItemResult> results;
  };

  void begin_poll_locked(Instant now, bool overran);
  /// Moves arrived answers into results; on `final`, unanswered items fail.
  void collect_locked(bool final);
  void finish_poll_locked(Instant now);
  std::size_t index_of_locked(std::string_view name) const;
  void require_item(std::string_view name) const;

  net::Network& network_;
  DeviceConfig config_;
  std::unique_ptr<ciplite::ExplicitClient> poll_client_;
  /// Caller-thread client for writes and tag listing; shared with tokens.
  std::shared_ptr<ciplite::ExplicitClient> call_client_;

  mutable std::mutex mutex_;
  std::vector<Item> items_;
  std::optional<InFlight> in_flight_;
  std::uint64_t epoch_ = 0;
  std::uint64_t polls_started_ = 0;
  Instant next_due_{};
  /// The previous poll finished after the next slot began.
  bool next_late_ = false;
  std::deque<PollReport> reports_;
  std::function<void(const PollReport&)> observer_;
  bool running_ = false;
  Duration last_latency_{0};
};

/// Network interface binding plus the devices reached through it.
class Channel {
 public:
  Channel(std::string name, net::Network& network, std::string interface_host = "127.0.0.1");

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::string& interface_host() const { return interface_host_; }
  [[nodiscard]] static constexpr std::string_view driver() { return "ciplite"; }

  /// Throws ConfigError for a duplicate name or non-positive scan rate.
  Device& add_device(DeviceConfig config);
  Device& device(std::string_view name);
  [[nodiscard]] std::vector<std::string> device_names() const;

 private:
  std::string name_;
  net::Network& network_;
  std::string interface_host_;
  std::map<std::string, std::unique_ptr<Device>, std::less<>> devices_;
};

class Gateway {
 public:
  explicit Gateway(net::Network& network) : network_(network) {}

  /// Throws ConfigError for a duplicate name.
  Channel& add_channel(std::string name, std::string interface_host = "127.0.0.1");
  Channel& channel(std::string_view name);

  void start();
  void stop();

 private:
  net::Network& network_;
  std::map<std::string, std::unique_ptr<Channel>, std::less<>> channels_;
};

}  // namespace plcbench::opcgw

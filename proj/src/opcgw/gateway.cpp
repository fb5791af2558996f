// SPDX-License-Identifier: Apache-2.0

#include "plcbench/opcgw/gateway.hpp"

#include <iomanip>
#include <sstream>

#include "plcbench/common/error.hpp"

namespace plcbench::opcgw {

const char* to_string(Quality quality) noexcept {
  switch (quality) {
    case Quality::Good: return "good";
    case Quality::Uncertain: return "uncertain";
    case Quality::Bad: return "bad";
  }
  return "?";
}

std::size_t PollReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : items) {
    n += r.quality == Quality::Bad ? 1 : 0;
  }
  return n;
}

std::string poll_reports_csv(const std::vector<PollReport>& reports) {
  std::ostringstream out;
  out << "epoch,started_us,completed_us,overran,item,quality,value,error\n";
  out << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& i : r.items) {
      out << r.epoch << ',' << to_micros(r.started.time_since_epoch()) << ','
          << to_micros(r.completed.time_since_epoch()) << ',' << (r.overran ? 1 : 0) << ',' << i.name << ','
          << to_string(i.quality) << ',' << i.value << ',' << i.error << '\n';
    }
  }
  return out.str();
}

struct CompletionToken::Shared {
  std::weak_ptr<ciplite::ExplicitClient> client;
  std::uint32_t request_id = 0;
  std::string tag;
  State state = State::Pending;
  std::string error;

  Shared() = default;
  Shared(const Shared&) = delete;
  Shared& operator=(const Shared&) = delete;
  ~Shared() {
    if (state == State::Pending) {
      if (auto c = client.lock()) {
        c->forget(request_id);
      }
    }
  }

  void settle(const ciplite::ExplicitResponse& response) {
    try {
      ciplite::ExplicitClient::check(response, tag);
      state = State::Succeeded;
    } catch (const Error& e) {
      state = State::Failed;
      error = e.what();
    }
  }
};

CompletionToken::State CompletionToken::status() {
  if (!shared_ || shared_->state != State::Pending) {
    return shared_ ? shared_->state : State::Failed;
  }
  auto client = shared_->client.lock();
  if (!client) {
    shared_->state = State::Failed;
    shared_->error = "device closed";
    return shared_->state;
  }
  client->pump();
  if (auto c = client->take(shared_->request_id)) {
    shared_->settle(c->response);
  }
  return shared_->state;
}

CompletionToken::State CompletionToken::wait(Instant deadline) {
  if (status() != State::Pending) {
    return shared_ ? shared_->state : State::Failed;
  }
  auto client = shared_->client.lock();
  try {
    shared_->settle(client->await(shared_->request_id, deadline).response);
  } catch (const TimeoutError& e) {
    shared_->state = State::Failed;
    shared_->error = e.what();
  }
  return shared_->state;
}

std::string CompletionToken::error() const { return shared_ ? shared_->error : "empty token"; }

Device::Device(net::Network& network, DeviceConfig config) : network_(network), config_(std::move(config)) {
  if (config_.scan_rate <= Duration::zero() || config_.timeout <= Duration::zero()) {
    throw ConfigError("device " + config_.name + ": scan rate and timeout must be positive");
  }
  const ciplite::ExplicitClientOptions options{config_.timeout};
  poll_client_ = std::make_unique<ciplite::ExplicitClient>(network_, network_.bind(0), config_.target, options);
  call_client_ = std::make_shared<ciplite::ExplicitClient>(network_, network_.bind(0), config_.target, options);
}

Device::~Device() { stop(); }

std::vector<Item> Device::auto_create_items() {
  if (running_) {
    throw Error("device " + config_.name + ": items cannot change while polling");
  }
  call_client_->pump();
  std::vector<ciplite::TagInfo> tags;
  try {
    tags = call_client_->list_tags();
  } catch (const TimeoutError& e) {
    throw ConnectionError("device " + config_.name + " unreachable: " + e.what());
  }
  std::vector<Item> created;
  for (const auto& tag : tags) {
    created.push_back(Item{tag.name});
  }
  std::lock_guard lock(mutex_);
  items_ = created;
  return created;
}

void Device::add_item(std::string name) {
  if (running_) {
    throw Error("device " + config_.name + ": items cannot change while polling");
  }
  std::lock_guard lock(mutex_);
  for (const auto& i : items_) {
    if (i.name == name) {
      throw ConfigError("duplicate item '" + name + "'");
    }
  }
  items_.push_back(Item{std::move(name)});
}

PollReport Device::poll_tick() {
  if (running_) {
    throw Error("device " + config_.name + ": poll_tick while polling on schedule");
  }
  Instant deadline;
  {
    std::lock_guard lock(mutex_);
    begin_poll_locked(network_.now(), false);
    deadline = in_flight_->deadline;
  }
  network_.wait_until(
      [this] {
        std::lock_guard lock(mutex_);
        collect_locked(false);
        return in_flight_->pending.empty();
      },
      deadline);
  std::lock_guard lock(mutex_);
  collect_locked(true);
  finish_poll_locked(network_.now());
  return reports_.back();
}

void Device::start() {
  if (running_) {
    return;
  }
  {
    std::lock_guard lock(mutex_);
    next_due_ = network_.now();
    next_late_ = false;
    running_ = true;
  }
  network_.attach(*this, {&poll_client_->transport()});
}

void Device::stop() {
  if (!running_) {
    return;
  }
  network_.detach(*this);
  std::lock_guard lock(mutex_);
  running_ = false;
  if (in_flight_) {
    for (const auto& p : in_flight_->pending) {
      poll_client_->forget(p.request_id);
    }
    in_flight_.reset();
  }
}

double Device::read_sync(std::string_view item) {
  require_item(item);
  const Instant call = network_.now();
  std::uint64_t target = 0;
  {
    std::lock_guard lock(mutex_);
    target = polls_started_ + 1;
  }
  const bool fresh = network_.wait_until(
      [this, target] {
        std::lock_guard lock(mutex_);
        return epoch_ >= target;
      },
      call + 2 * config_.scan_rate + config_.timeout);
  if (!fresh) {
    throw TimeoutError("device " + config_.name + ": no poll completed for '" + std::string(item) + "'");
  }
  std::lock_guard lock(mutex_);
  last_latency_ = network_.now() - call;
  const Item& it = items_[index_of_locked(item)];
  if (it.quality == Quality::Bad) {
    throw QualityError("item '" + it.name + "' has bad quality");
  }
  return it.value;
}

void Device::write_sync(std::string_view item, double value) {
  require_item(item);
  call_client_->pump();
  const Instant start = network_.now();
  call_client_->write(item, value);
  last_latency_ = network_.now() - start;
}

CompletionToken Device::write_async(std::string_view item, double value) {
  auto shared = std::make_shared<CompletionToken::Shared>();
  shared->tag = std::string(item);
  shared->client = call_client_;
  try {
    require_item(item);
  } catch (const NameError& e) {
    shared->state = CompletionToken::State::Failed;
    shared->error = e.what();
    return CompletionToken(std::move(shared));
  }
  call_client_->pump();
  shared->request_id = call_client_->submit(ciplite::ExplicitRequest::write(shared->tag, value));
  return CompletionToken(std::move(shared));
}

double Device::cycle(std::string_view write_item, std::string_view read_item, double value) {
  require_item(write_item);
  require_item(read_item);
  const Instant start = network_.now();
  const Instant deadline = start + 4 * config_.scan_rate + 2 * config_.timeout;
  write_async(write_item, value);
  while (true) {
    const double seen = read_sync(read_item);
    if (same_bits(seen, value)) {
      last_latency_ = network_.now() - start;
      return seen;
    }
    if (network_.now() >= deadline) {
      throw TimeoutError("device " + config_.name + ": '" + std::string(read_item) + "' never showed the written value");
    }
  }
}

std::vector<Item> Device::items() const {
  std::lock_guard lock(mutex_);
  return items_;
}

Item Device::item(std::string_view name) const {
  std::lock_guard lock(mutex_);
  return items_[index_of_locked(name)];
}

std::uint64_t Device::epoch() const {
  std::lock_guard lock(mutex_);
  return epoch_;
}

std::uint64_t Device::polls_started() const {
  std::lock_guard lock(mutex_);
  return polls_started_;
}

std::vector<PollReport> Device::recent_reports() const {
  std::lock_guard lock(mutex_);
  return {reports_.begin(), reports_.end()};
}

void Device::set_poll_observer(std::function<void(const PollReport&)> observer) {
  std::lock_guard lock(mutex_);
  observer_ = std::move(observer);
}

std::optional<Instant> Device::next_wakeup() const {
  std::lock_guard lock(mutex_);
  if (in_flight_) {
    return in_flight_->deadline;
  }
  if (running_) {
    return next_due_;
  }
  return std::nullopt;
}

void Device::wake(Instant now) {
  std::lock_guard lock(mutex_);
  if (in_flight_) {
    collect_locked(now >= in_flight_->deadline);
    if (in_flight_->pending.empty()) {
      finish_poll_locked(now);
    }
  }
  if (!in_flight_ && running_ && now >= next_due_) {
    const bool late = next_late_;
    while (next_due_ <= now) {
      next_due_ += config_.scan_rate;
    }
    begin_poll_locked(now, late);
    if (in_flight_->pending.empty()) {
      finish_poll_locked(now);
    }
  }
}

void Device::begin_poll_locked(Instant now, bool overran) {
  InFlight f;
  f.report.epoch = ++polls_started_;
  f.report.started = now;
  f.report.overran = overran;
  f.deadline = now + config_.timeout;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    f.pending.push_back(Pending{i, poll_client_->submit(ciplite::ExplicitRequest::read(items_[i].name))});
  }
  in_flight_ = std::move(f);
}

void Device::collect_locked(bool final) {
  poll_client_->pump();
  auto& f = *in_flight_;
  std::vector<Pending> still;
  for (const auto& p : f.pending) {
    ItemResult r;
    r.name = items_[p.item].name;
    if (auto c = poll_client_->take(p.request_id)) {
      try {
        ciplite::ExplicitClient::check(c->response, r.name);
        r.quality = f.report.overran ? Quality::Uncertain : Quality::Good;
        r.value = c->response.value();
      } catch (const Error& e) {
        r.error = e.what();
      }
      f.results[p.item] = std::move(r);
    } else if (final) {
      poll_client_->forget(p.request_id);
      r.error = "timed out";
      f.results[p.item] = std::move(r);
    } else {
      still.push_back(p);
    }
  }
  f.pending = std::move(still);
}

void Device::finish_poll_locked(Instant now) {
  PollReport report = std::move(in_flight_->report);
  auto results = std::move(in_flight_->results);
  in_flight_.reset();
  ++epoch_;
  report.completed = now;
  for (auto& [index, r] : results) {
    Item& it = items_[index];
    it.quality = r.quality;
    if (r.quality != Quality::Bad) {
      it.value = r.value;
      it.last_refresh = now;
      it.refresh_epoch = epoch_;
    }
    report.items.push_back(std::move(r));
  }
  next_late_ = running_ && now > next_due_;
  reports_.push_back(report);
  if (reports_.size() > kReportHistory) {
    reports_.pop_front();
  }
  if (observer_) {
    observer_(report);
  }
}

std::size_t Device::index_of_locked(std::string_view name) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].name == name) {
      return i;
    }
  }
  throw NameError("unknown item '" + std::string(name) + "' on device " + config_.name);
}

void Device::require_item(std::string_view name) const {
  std::lock_guard lock(mutex_);
  index_of_locked(name);
}

Channel::Channel(std::string name, net::Network& network, std::string interface_host)
    : name_(std::move(name)), network_(network), interface_host_(std::move(interface_host)) {}

Device& Channel::add_device(DeviceConfig config) {
  if (devices_.count(config.name) != 0) {
    throw ConfigError("duplicate device '" + config.name + "' on channel " + name_);
  }
  auto name = config.name;
  auto device = std::make_unique<Device>(network_, std::move(config));
  return *devices_.emplace(std::move(name), std::move(device)).first->second;
}

Device& Channel::device(std::string_view name) {
  auto it = devices_.find(name);
  if (it == devices_.end()) {
    throw NameError("unknown device '" + std::string(name) + "' on channel " + name_);
  }
  return *it->second;
}

std::vector<std::string> Channel::device_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : devices_) {
    out.push_back(name);
  }
  return out;
}

Channel& Gateway::add_channel(std::string name, std::string interface_host) {
  if (channels_.count(name) != 0) {
    throw ConfigError("duplicate channel '" + name + "'");
  }
  auto key = name;
  auto channel = std::make_unique<Channel>(std::move(name), network_, std::move(interface_host));
  return *channels_.emplace(std::move(key), std::move(channel)).first->second;
}

Channel& Gateway::channel(std::string_view name) {
  auto it = channels_.find(name);
  if (it == channels_.end()) {
    throw NameError("unknown channel '" + std::string(name) + "'");
  }
  return *it->second;
}

void Gateway::start() {
  for (auto& [_, channel] : channels_) {
    for (const auto& d : channel->device_names()) {
      channel->device(d).start();
    }
  }
}

void Gateway::stop() {
  for (auto& [_, channel] : channels_) {
    for (const auto& d : channel->device_names()) {
      channel->device(d).stop();
    }
  }
}

}  // namespace plcbench::opcgw

// SPDX-License-Identifier: Apache-2.0

#include "plcbench/plcsim/emulator.hpp"

#include <algorithm>
#include <sstream>
#include <variant>

#include "plcbench/ciplite/messages.hpp"
#include "plcbench/common/error.hpp"
#include "plcbench/fins/frame.hpp"
#include "plcbench/udplink/client.hpp"

namespace plcbench::plcsim {

namespace {

using InboundRequest = std::variant<fins::Request, ciplite::ExplicitRequest, ciplite::LinkMessage>;

struct Inbound {
  std::uint64_t order;
  Instant arrival;
  net::Address from;
  InboundRequest request;
};

std::uint16_t end_code_for(DecodeError::Kind kind) {
  switch (kind) {
    case DecodeError::Kind::UnsupportedCommand: return fins::end_code::kUndefinedCommand;
    case DecodeError::Kind::TrailingBytes: return fins::end_code::kCommandTooLong;
    case DecodeError::Kind::InvalidCount: return fins::end_code::kParameterError;
    default: return fins::end_code::kCommandTooShort;
  }
}

/// Error answer for a FINS frame that failed to decode. Needs at least the
/// header and the command code, which is echoed as received.
std::optional<Bytes> fins_error_response(ByteView in, const DecodeError& error) {
  if (in.size() < fins::kBodyOffset) {
    return std::nullopt;
  }
  const fins::Header request{in[0], in[1], in[2], in[3], in[4], in[5], in[6], in[7], in[8], in[9]};
  if (request.is_response()) {
    return std::nullopt;
  }
  const fins::Header h = request.response_header();
  Bytes out{h.icf, h.rsv, h.gct, h.dna, h.da1, h.da2, h.sna, h.sa1, h.sa2, h.sid};
  put_u16(out, get_u16(in, fins::kCommandOffset));
  put_u16(out, end_code_for(error.kind()));
  return out;
}

std::optional<ciplite::TagDirection> direction_of(Publish p) {
  switch (p) {
    case Publish::Input: return ciplite::TagDirection::InputPublish;
    case Publish::Output: return ciplite::TagDirection::OutputPublish;
    case Publish::None: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string ScanReport::to_log_line() const {
  std::ostringstream out;
  out << "scan=" << scan_index << " t_us=" << to_micros(time.time_since_epoch())
      << " fins=" << fins_requests << " cip=" << cip_requests << " link_in=" << link_messages
      << " udp_in=" << udp_datagrams << " writes=" << writes_applied << " reads=" << reads_served
      << " echoes=" << echoes_sent << " produced=" << links_produced << " malformed=" << malformed
      << " emitted=" << messages_emitted;
  return out.str();
}

Emulator::Emulator(std::vector<Variable> variables, ScanConfig scan, net::Network& network,
                   EmulatorOptions options)
    : network_(network), options_(std::move(options)), scan_(std::move(scan)), table_(std::move(variables)) {
  if (scan_.task_period <= Duration::zero()) {
    throw ConfigError("task period must be positive");
  }
  for (const auto& rule : scan_.copy_rules) {
    const auto src = table_.index_of(rule.source);
    const auto dst = table_.index_of(rule.destination);
    if (!src || !dst) {
      throw ConfigError("copy rule " + rule.source + " -> " + rule.destination +
                        " references an unknown variable");
    }
    copy_indices_.emplace_back(*src, *dst);
  }
  udp_input_ = table_.index_of(options_.udp_input);
  udp_output_ = table_.index_of(options_.udp_output);

  fins_ = network_.bind(options_.ports.fins, net::Service::Fins);
  cip_ = network_.bind(options_.ports.cip, net::Service::Cip);
  echo_ = network_.bind(options_.ports.echo, net::Service::RawEcho);
}

Emulator::~Emulator() { stop(); }

ScanReport Emulator::scan_step() {
  ScanReport report;
  {
    std::lock_guard lock(mutex_);
    report = scan_locked(network_.now());
  }
  scans_.fetch_add(1);
  served_[static_cast<std::size_t>(ServedProtocol::Fins)].fetch_add(report.fins_requests);
  served_[static_cast<std::size_t>(ServedProtocol::Cip)].fetch_add(report.cip_requests);
  served_[static_cast<std::size_t>(ServedProtocol::RawUdp)].fetch_add(report.echoes_sent);
  if (options_.log != nullptr) {
    *options_.log << report.to_log_line() << '\n';
  }
  if (observer_) {
    observer_(report);
  }
  return report;
}

ScanReport Emulator::scan_locked(Instant now) {
  ScanReport report;
  report.scan_index = scans_.load() + 1;
  report.time = now;

  std::uint64_t order = 0;
  std::vector<Inbound> inbound;
  std::vector<Outbound> responses;

  // (1) drain
  while (auto d = fins_->try_receive()) {
    try {
      auto frame = fins::decode_frame(d->payload);
      if (auto* request = std::get_if<fins::Request>(&frame)) {
        inbound.push_back(Inbound{order++, d->arrival, d->from, std::move(*request)});
      } else {
        ++report.malformed;
      }
    } catch (const DecodeError& e) {
      ++report.malformed;
      if (auto answer = fins_error_response(d->payload, e)) {
        ++report.fins_requests;
        responses.push_back(Outbound{order++, d->from, std::move(*answer), fins_.get()});
      }
    }
  }
  while (auto d = cip_->try_receive()) {
    try {
      auto message = ciplite::decode_message(d->payload);
      if (auto* request = std::get_if<ciplite::ExplicitRequest>(&message)) {
        inbound.push_back(Inbound{order++, d->arrival, d->from, std::move(*request)});
      } else if (auto* link = std::get_if<ciplite::LinkMessage>(&message)) {
        ++report.link_messages;
        inbound.push_back(Inbound{order++, d->arrival, d->from, *link});
      } else {
        ++report.malformed;
      }
    } catch (const DecodeError& e) {
      ++report.malformed;
      if (auto id = ciplite::peek_request_id(d->payload)) {
        const auto status = e.kind() == DecodeError::Kind::UnsupportedCommand
                                ? ciplite::Status::UnsupportedService
                                : ciplite::Status::Malformed;
        ++report.cip_requests;
        responses.push_back(Outbound{
            order++, d->from,
            ciplite::encode_message(ciplite::ExplicitResponse{ciplite::ServiceCode::ReadTag, *id, status, 0, {}}),
            cip_.get()});
      }
    }
  }
  while (auto d = echo_->try_receive()) {
    if (d->payload.size() == udplink::kPayloadSize) {
      ++report.udp_datagrams;
      echo_queue_.push_back(std::move(*d));
    } else {
      ++report.malformed;
    }
  }
  std::stable_sort(inbound.begin(), inbound.end(),
                   [](const Inbound& a, const Inbound& b) { return a.arrival < b.arrival; });

  auto published = [this](const std::string& tag) -> std::optional<std::size_t> {
    auto i = table_.index_of(tag);
    if (!i || table_.at(*i).publish == Publish::None) {
      return std::nullopt;
    }
    return i;
  };
  auto dm_check = [this](std::uint8_t area, std::uint16_t address, std::uint8_t bit, std::uint32_t count) {
    if (area != fins::kAreaDmWord) return fins::end_code::kNoAreaType;
    if (bit != 0) return fins::end_code::kParameterError;
    if (!table_.mapped(address, count)) return fins::end_code::kAddressRangeError;
    return fins::end_code::kNormal;
  };

  // (2) writes
  for (auto& in : inbound) {
    if (auto* req = std::get_if<fins::Request>(&in.request)) {
      const auto* write = std::get_if<fins::MemoryAreaWrite>(&req->command);
      if (write == nullptr) {
        continue;
      }
      const auto code = dm_check(write->area, write->address, write->bit, write->count);
      if (code == fins::end_code::kNormal) {
        for (std::size_t i = 0; i < write->words.size(); ++i) {
          table_.write_word(static_cast<std::uint16_t>(write->address + i), write->words[i]);
        }
        ++report.writes_applied;
      }
      ++report.fins_requests;
      responses.push_back(Outbound{
          in.order, in.from,
          fins::encode_frame(fins::Response{req->header.response_header(), fins::kMemoryAreaWrite, code, {}}),
          fins_.get()});
    } else if (auto* creq = std::get_if<ciplite::ExplicitRequest>(&in.request)) {
      if (creq->service != ciplite::ServiceCode::WriteTag) {
        continue;
      }
      auto status = ciplite::Status::Ok;
      const auto index = published(creq->tag);
      if (!index) {
        status = ciplite::Status::UnknownTag;
      } else if (table_.at(*index).publish != Publish::Input) {
        status = ciplite::Status::DirectionViolation;
      } else {
        table_.set_value(*index, double_from_bits(creq->value_bits));
        ++report.writes_applied;
      }
      ++report.cip_requests;
      responses.push_back(Outbound{in.order, in.from,
                                   ciplite::encode_message(ciplite::ExplicitResponse{
                                       creq->service, creq->request_id, status, 0, {}}),
                                   cip_.get()});
    } else {
      const auto& link = std::get<ciplite::LinkMessage>(in.request);
      if (auto update = links_.accept(link, now)) {
        if (auto index = table_.index_of(update->first)) {
          table_.set_value(*index, update->second);
          ++report.writes_applied;
        }
      }
    }
  }

  // (3) copy
  for (const auto& [src, dst] : copy_indices_) {
    const double v = table_.at(src).value;
    table_.set_value(dst, v);
    report.copied.emplace_back(table_.at(dst).name, bits_of(v));
  }

  // (4) reads
  for (auto& in : inbound) {
    if (auto* req = std::get_if<fins::Request>(&in.request)) {
      const auto* read = std::get_if<fins::MemoryAreaRead>(&req->command);
      if (read == nullptr) {
        continue;
      }
      fins::Response response{req->header.response_header(), fins::kMemoryAreaRead,
                              dm_check(read->area, read->address, read->bit, read->count), {}};
      if (response.end_code == fins::end_code::kNormal) {
        for (std::uint32_t i = 0; i < read->count; ++i) {
          response.payload.push_back(table_.read_word(static_cast<std::uint16_t>(read->address + i)));
        }
        ++report.reads_served;
      }
      ++report.fins_requests;
      responses.push_back(Outbound{in.order, in.from, fins::encode_frame(response), fins_.get()});
    } else if (auto* creq = std::get_if<ciplite::ExplicitRequest>(&in.request)) {
      ciplite::ExplicitResponse response{creq->service, creq->request_id, ciplite::Status::Ok, 0, {}};
      if (creq->service == ciplite::ServiceCode::ReadTag) {
        if (auto index = published(creq->tag)) {
          response.value_bits = bits_of(table_.at(*index).value);
          ++report.reads_served;
        } else {
          response.status = ciplite::Status::UnknownTag;
        }
      } else if (creq->service == ciplite::ServiceCode::ListTags) {
        for (const auto& v : table_.variables()) {
          if (auto dir = direction_of(v.publish)) {
            response.tags.push_back(ciplite::TagInfo{v.name, *dir});
          }
        }
        ++report.reads_served;
      } else {
        continue;
      }
      ++report.cip_requests;
      responses.push_back(Outbound{in.order, in.from, ciplite::encode_message(response), cip_.get()});
    }
  }

  // (5) echo rungs: the rung that received last scan sends now, the other
  // one takes the next queued datagram.
  std::vector<Outbound> echoes;
  const std::size_t active = report.scan_index % 2;
  auto& sending = rungs_[1 - active];
  if (sending) {
    Bytes payload = sending->payload;
    if (udplink::is_query(payload)) {
      const double answer = udp_output_ ? table_.at(*udp_output_).value : 0.0;
      const auto encoded = udplink::encode_value(answer);
      payload.assign(encoded.begin(), encoded.end());
    }
    echoes.push_back(Outbound{0, sending->reply_to, std::move(payload)});
    ++report.echoes_sent;
    sending.reset();
  }
  if (!echo_queue_.empty() && !rungs_[active]) {
    net::Datagram d = std::move(echo_queue_.front());
    echo_queue_.pop_front();
    if (!udplink::is_query(d.payload) && udp_input_) {
      table_.set_value(*udp_input_, udplink::decode_value(d.payload));
    }
    rungs_[active] = RungSlot{d.from, std::move(d.payload)};
  }

  // (6) producers
  auto produced = links_.produce_due(now, [this](const std::string& tag) {
    auto i = table_.index_of(tag);
    return i ? table_.at(*i).value : 0.0;
  });
  report.links_produced = static_cast<std::uint32_t>(produced.size());

  std::stable_sort(responses.begin(), responses.end(),
                   [](const Outbound& a, const Outbound& b) { return a.order < b.order; });
  for (const auto& r : responses) {
    r.via->send(r.to, r.payload);
  }
  for (const auto& e : echoes) {
    echo_->send(e.to, e.payload);
  }
  for (const auto& p : produced) {
    cip_->send(p.target, p.payload);
  }
  report.messages_emitted = static_cast<std::uint32_t>(responses.size() + echoes.size() + produced.size());
  return report;
}

void Emulator::start() {
  if (running_) {
    return;
  }
  next_scan_ns_ = (network_.now() + scan_.task_period).time_since_epoch().count();
  running_ = true;
  network_.attach(*this, {});
}

void Emulator::stop() {
  if (!running_) {
    return;
  }
  network_.detach(*this);
  running_ = false;
}

void Emulator::run_for(Duration duration) {
  const bool was_running = running_;
  start();
  network_.sleep_for(duration);
  if (!was_running) {
    stop();
  }
}

std::uint64_t Emulator::run_until_served(ServedProtocol protocol, std::uint64_t count, Duration timeout) {
  const std::uint64_t base = served(protocol);
  const bool was_running = running_;
  start();
  network_.wait_until([&] { return served(protocol) - base >= count; }, network_.now() + timeout);
  if (!was_running) {
    stop();
  }
  return served(protocol) - base;
}

Instant Emulator::sim_now() const {
  if (!network_.simulated()) {
    throw UnsupportedModeError("sim_now requires a simulated network");
  }
  return network_.now();
}

double Emulator::value(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto index = table_.index_of(name);
  if (!index) {
    throw NameError("unknown variable '" + std::string(name) + "'");
  }
  return table_.at(*index).value;
}

void Emulator::set_value(std::string_view name, double value) {
  std::lock_guard lock(mutex_);
  auto index = table_.index_of(name);
  if (!index) {
    throw NameError("unknown variable '" + std::string(name) + "'");
  }
  table_.set_value(*index, value);
}

std::vector<Variable> Emulator::snapshot() const {
  std::lock_guard lock(mutex_);
  return table_.variables();
}

std::uint64_t Emulator::served(ServedProtocol protocol) const {
  return served_[static_cast<std::size_t>(protocol)].load();
}

void Emulator::set_scan_observer(std::function<void(const ScanReport&)> observer) {
  std::lock_guard lock(mutex_);
  observer_ = std::move(observer);
}

std::optional<ciplite::TagDirection> Emulator::tag_direction(std::string_view tag) const {
  std::lock_guard lock(mutex_);
  auto index = table_.index_of(tag);
  if (!index) {
    return std::nullopt;
  }
  return direction_of(table_.at(*index).publish);
}

// Productions are published by the first scan at or after their due time.
void Emulator::add_production(ciplite::Production production) {
  std::lock_guard lock(mutex_);
  links_.add_production(std::move(production), network_.now());
}

void Emulator::add_consumption(std::uint32_t connection_id, std::string tag) {
  std::lock_guard lock(mutex_);
  links_.add_consumption(connection_id, std::move(tag));
}

void Emulator::remove_connection(std::uint32_t connection_id) {
  std::lock_guard lock(mutex_);
  links_.remove(connection_id);
}

bool Emulator::has_connection(std::uint32_t connection_id) const {
  std::lock_guard lock(mutex_);
  return links_.has(connection_id);
}

std::optional<ciplite::ConsumedValue> Emulator::consumed(std::uint32_t connection_id) const {
  std::lock_guard lock(mutex_);
  return links_.consumed(connection_id);
}

std::optional<Instant> Emulator::next_wakeup() const {
  if (!running_) {
    return std::nullopt;
  }
  return Instant{Duration{next_scan_ns_.load()}};
}

void Emulator::wake(Instant now) {
  const auto due = next_scan_ns_.load();
  if (now.time_since_epoch().count() < due) {
    return;
  }
  scan_step();
  auto next = due + scan_.task_period.count();
  while (next <= now.time_since_epoch().count()) {
    next += scan_.task_period.count();
  }
  next_scan_ns_ = next;
}

}  // namespace plcbench::plcsim

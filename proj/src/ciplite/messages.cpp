// SPDX-License-Identifier: Apache-2.0

#include "plcbench/ciplite/messages.hpp"

#include "plcbench/common/error.hpp"

namespace plcbench::ciplite {

namespace {

using Kind = DecodeError::Kind;

[[noreturn]] void fail(Kind kind, std::size_t offset) {
  throw DecodeError(kind, offset, to_string(kind));
}

bool is_service(std::uint8_t code) {
  return code == static_cast<std::uint8_t>(ServiceCode::ReadTag) ||
         code == static_cast<std::uint8_t>(ServiceCode::WriteTag) ||
         code == static_cast<std::uint8_t>(ServiceCode::ListTags);
}

void put_name(Bytes& out, const std::string& name) {
  if (name.size() > kMaxTagName) {
    throw EncodeError("tag name longer than 255 bytes");
  }
  put_u8(out, static_cast<std::uint8_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
}

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      fail(Kind::TruncatedBody, in_.size());
    }
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    pos_ += 2;
    return get_u16(in_, pos_ - 2);
  }
  std::uint32_t u32() {
    need(4);
    pos_ += 4;
    return get_u32(in_, pos_ - 4);
  }
  std::uint64_t u64() {
    need(8);
    pos_ += 8;
    return get_u64(in_, pos_ - 8);
  }
  std::string name() {
    const std::uint8_t len = u8();
    need(len);
    std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return s;
  }
  void finish() const {
    if (pos_ != in_.size()) {
      fail(Kind::TrailingBytes, pos_);
    }
  }
  [[nodiscard]] std::size_t pos() const { return pos_; }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

TagDirection direction_from(std::uint8_t raw, std::size_t offset) {
  if (raw != static_cast<std::uint8_t>(TagDirection::InputPublish) &&
      raw != static_cast<std::uint8_t>(TagDirection::OutputPublish)) {
    fail(Kind::InvalidField, offset);
  }
  return static_cast<TagDirection>(raw);
}

}  // namespace

const char* to_string(Status status) noexcept {
  switch (status) {
    case Status::Ok: return "ok";
    case Status::UnknownTag: return "unknown tag";
    case Status::DirectionViolation: return "direction violation";
    case Status::Malformed: return "malformed request";
    case Status::UnsupportedService: return "unsupported service";
  }
  return "unknown status";
}

const char* to_string(TagDirection direction) noexcept {
  return direction == TagDirection::InputPublish ? "input" : "output";
}

Bytes encode_message(const Message& message) {
  Bytes out;
  if (const auto* req = std::get_if<ExplicitRequest>(&message)) {
    put_u8(out, static_cast<std::uint8_t>(req->service));
    put_u32(out, req->request_id);
    if (req->service != ServiceCode::ListTags) {
      put_name(out, req->tag);
    }
    if (req->service == ServiceCode::WriteTag) {
      put_u64(out, req->value_bits);
    }
  } else if (const auto* resp = std::get_if<ExplicitResponse>(&message)) {
    put_u8(out, static_cast<std::uint8_t>(static_cast<std::uint8_t>(resp->service) | kReplyFlag));
    put_u32(out, resp->request_id);
    put_u8(out, static_cast<std::uint8_t>(resp->status));
    if (resp->status == Status::Ok && resp->service == ServiceCode::ReadTag) {
      put_u64(out, resp->value_bits);
    } else if (resp->status == Status::Ok && resp->service == ServiceCode::ListTags) {
      put_u16(out, static_cast<std::uint16_t>(resp->tags.size()));
      for (const auto& tag : resp->tags) {
        put_u8(out, static_cast<std::uint8_t>(tag.direction));
        put_name(out, tag.name);
      }
    }
  } else {
    const auto& link = std::get<LinkMessage>(message);
    put_u8(out, kLinkMessageType);
    put_u32(out, link.connection_id);
    put_u32(out, link.sequence);
    put_u64(out, link.value_bits);
    put_u64(out, static_cast<std::uint64_t>(link.produced_ns));
  }
  return out;
}

Message decode_message(ByteView bytes) {
  if (bytes.empty()) {
    fail(Kind::TruncatedHeader, 0);
  }
  Reader r(bytes);
  const std::uint8_t type = r.u8();

  if (type == kLinkMessageType) {
    LinkMessage m;
    m.connection_id = r.u32();
    m.sequence = r.u32();
    m.value_bits = r.u64();
    m.produced_ns = static_cast<std::int64_t>(r.u64());
    r.finish();
    return m;
  }

  const bool reply = (type & kReplyFlag) != 0;
  const auto code = static_cast<std::uint8_t>(type & ~kReplyFlag);
  if (!is_service(code)) {
    fail(Kind::UnsupportedCommand, 0);
  }
  const auto service = static_cast<ServiceCode>(code);

  if (!reply) {
    ExplicitRequest req{service, r.u32(), {}, 0};
    if (service != ServiceCode::ListTags) {
      req.tag = r.name();
      if (req.tag.empty()) {
        fail(Kind::InvalidField, 5);
      }
    }
    if (service == ServiceCode::WriteTag) {
      req.value_bits = r.u64();
    }
    r.finish();
    return req;
  }

  ExplicitResponse resp{service, r.u32(), Status::Ok, 0, {}};
  const std::size_t status_at = r.pos();
  const std::uint8_t status = r.u8();
  if (status > static_cast<std::uint8_t>(Status::UnsupportedService)) {
    fail(Kind::InvalidField, status_at);
  }
  resp.status = static_cast<Status>(status);
  if (resp.status == Status::Ok && service == ServiceCode::ReadTag) {
    resp.value_bits = r.u64();
  } else if (resp.status == Status::Ok && service == ServiceCode::ListTags) {
    const std::uint16_t count = r.u16();
    for (std::uint16_t i = 0; i < count; ++i) {
      const std::size_t dir_at = r.pos();
      const auto direction = direction_from(r.u8(), dir_at);
      resp.tags.push_back(TagInfo{r.name(), direction});
    }
  }
  r.finish();
  return resp;
}

std::optional<std::uint32_t> peek_request_id(ByteView bytes) {
  if (bytes.size() < 5 || (bytes[0] & kReplyFlag) != 0) {
    return std::nullopt;
  }
  return get_u32(bytes, 1);
}

}  // namespace plcbench::ciplite

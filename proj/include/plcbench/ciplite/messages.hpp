// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plcbench/common/bytes.hpp"
#include "plcbench/common/time.hpp"

namespace plcbench::ciplite {

// Compact datagram format. Explicit messages start with a service code
// (replies set the high bit); tag-link messages start with kLinkMessageType.
// Integers are big-endian, floats travel as their IEEE-754 bit pattern.

enum class ServiceCode : std::uint8_t { ReadTag = 0x4C, WriteTag = 0x4D, ListTags = 0x55 };
inline constexpr std::uint8_t kReplyFlag = 0x80;
inline constexpr std::uint8_t kLinkMessageType = 0xA0;
inline constexpr std::size_t kMaxTagName = 255;

enum class Status : std::uint8_t {
  Ok = 0,
  UnknownTag = 1,
  DirectionViolation = 2,
  Malformed = 3,
  UnsupportedService = 4,
};

enum class TagDirection : std::uint8_t { InputPublish = 1, OutputPublish = 2 };

const char* to_string(Status status) noexcept;
const char* to_string(TagDirection direction) noexcept;

struct ExplicitRequest {
  ServiceCode service = ServiceCode::ReadTag;
  std::uint32_t request_id = 0;
  std::string tag;                // empty for ListTags
  std::uint64_t value_bits = 0;   // WriteTag only

  static ExplicitRequest read(std::string tag) { return {ServiceCode::ReadTag, 0, std::move(tag), 0}; }
  static ExplicitRequest write(std::string tag, double value) {
    return {ServiceCode::WriteTag, 0, std::move(tag), bits_of(value)};
  }
  static ExplicitRequest list() { return {ServiceCode::ListTags, 0, {}, 0}; }

  bool operator==(const ExplicitRequest&) const = default;
};

struct TagInfo {
  std::string name;
  TagDirection direction = TagDirection::InputPublish;

  bool operator==(const TagInfo&) const = default;
};

struct ExplicitResponse {
  ServiceCode service = ServiceCode::ReadTag;
  std::uint32_t request_id = 0;
  Status status = Status::Ok;
  std::uint64_t value_bits = 0;  // successful ReadTag
  std::vector<TagInfo> tags;     // successful ListTags

  [[nodiscard]] double value() const { return double_from_bits(value_bits); }
  bool operator==(const ExplicitResponse&) const = default;
};

/// One production of a tag data link. Addressed by connection id only.
struct LinkMessage {
  std::uint32_t connection_id = 0;
  std::uint32_t sequence = 0;
  std::uint64_t value_bits = 0;
  std::int64_t produced_ns = 0;  // producer clock, ns since its epoch

  [[nodiscard]] double value() const { return double_from_bits(value_bits); }
  [[nodiscard]] Instant produced_at() const { return Instant{Duration{produced_ns}}; }
  bool operator==(const LinkMessage&) const = default;
};

using Message = std::variant<ExplicitRequest, ExplicitResponse, LinkMessage>;

Bytes encode_message(const Message& message);
/// Throws DecodeError.
Message decode_message(ByteView bytes);

/// Request id of a datagram that at least carries an explicit header; used
/// to answer malformed requests.
std::optional<std::uint32_t> peek_request_id(ByteView bytes);

}  // namespace plcbench::ciplite

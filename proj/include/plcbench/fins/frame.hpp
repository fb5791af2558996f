// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "plcbench/common/bytes.hpp"

namespace plcbench::fins {

inline constexpr std::uint16_t kMemoryAreaRead = 0x0101;
inline constexpr std::uint16_t kMemoryAreaWrite = 0x0102;

/// DM area, word contents. The only area the emulator serves.
inline constexpr std::uint8_t kAreaDmWord = 0x82;

inline constexpr std::size_t kHeaderSize = 10;
inline constexpr std::size_t kCommandOffset = kHeaderSize;
inline constexpr std::size_t kBodyOffset = kHeaderSize + 2;

/// Words occupied by one LREAL in the DM image.
inline constexpr std::uint16_t kLrealWords = 4;

namespace end_code {
inline constexpr std::uint16_t kNormal = 0x0000;
inline constexpr std::uint16_t kUndefinedCommand = 0x0401;
inline constexpr std::uint16_t kCommandTooLong = 0x1001;
inline constexpr std::uint16_t kCommandTooShort = 0x1002;
inline constexpr std::uint16_t kNoAreaType = 0x1101;
inline constexpr std::uint16_t kAddressRangeError = 0x1103;
inline constexpr std::uint16_t kParameterError = 0x110C;
}  // namespace end_code

struct Header {
  std::uint8_t icf = 0x80;  // command, response required
  std::uint8_t rsv = 0x00;
  std::uint8_t gct = 0x02;
  std::uint8_t dna = 0x00;
  std::uint8_t da1 = 0x00;
  std::uint8_t da2 = 0x00;
  std::uint8_t sna = 0x00;
  std::uint8_t sa1 = 0x00;
  std::uint8_t sa2 = 0x00;
  std::uint8_t sid = 0x00;

  [[nodiscard]] bool is_response() const { return (icf & 0x40) != 0; }
  /// Header for the answer to a request carrying this header: source and
  /// destination swapped, sid kept.
  [[nodiscard]] Header response_header() const;

  auto operator<=>(const Header&) const = default;
};

struct MemoryAreaRead {
  std::uint8_t area = kAreaDmWord;
  std::uint16_t address = 0;
  std::uint8_t bit = 0;
  std::uint16_t count = 1;

  bool operator==(const MemoryAreaRead&) const = default;
};

struct MemoryAreaWrite {
  std::uint8_t area = kAreaDmWord;
  std::uint16_t address = 0;
  std::uint8_t bit = 0;
  std::uint16_t count = 0;
  std::vector<std::uint16_t> words;

  static MemoryAreaWrite of(std::uint16_t address, std::span<const std::uint16_t> words);
  bool operator==(const MemoryAreaWrite&) const = default;
};

using Command = std::variant<MemoryAreaRead, MemoryAreaWrite>;

struct Request {
  Header header;
  Command command;

  [[nodiscard]] std::uint16_t command_code() const;
  bool operator==(const Request&) const = default;
};

struct Response {
  Header header;
  std::uint16_t command_code = kMemoryAreaRead;
  std::uint16_t end_code = end_code::kNormal;
  std::vector<std::uint16_t> payload;

  bool operator==(const Response&) const = default;
};

using Frame = std::variant<Request, Response>;

/// Header, command code, then body; all integers big-endian.
/// Throws EncodeError when the frame violates its own invariants.
Bytes encode_frame(const Frame& frame);
Bytes encode_frame(const Request& request);
Bytes encode_frame(const Response& response);

/// Inverse of encode_frame. Requests and responses are told apart by the
/// ICF response bit. Throws DecodeError carrying the failing offset.
Frame decode_frame(ByteView bytes);

/// LREAL <-> DM words, most significant word first.
std::array<std::uint16_t, kLrealWords> lreal_to_words(double value);
double words_to_lreal(std::span<const std::uint16_t> words);

}  // namespace plcbench::fins

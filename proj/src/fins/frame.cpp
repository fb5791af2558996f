// SPDX-License-Identifier: Apache-2.0

#include "plcbench/fins/frame.hpp"

#include <string>

#include "plcbench/common/error.hpp"

namespace plcbench::fins {

namespace {

using Kind = DecodeError::Kind;

[[noreturn]] void fail(Kind kind, std::size_t offset) {
  throw DecodeError(kind, offset, to_string(kind));
}

void put_header(Bytes& out, const Header& h) {
  for (std::uint8_t b : {h.icf, h.rsv, h.gct, h.dna, h.da1, h.da2, h.sna, h.sa1, h.sa2, h.sid}) {
    out.push_back(b);
  }
}

Header get_header(ByteView in) {
  return Header{in[0], in[1], in[2], in[3], in[4], in[5], in[6], in[7], in[8], in[9]};
}

void put_words(Bytes& out, std::span<const std::uint16_t> words) {
  for (std::uint16_t w : words) {
    put_u16(out, w);
  }
}

std::vector<std::uint16_t> get_words(ByteView in, std::size_t at, std::size_t count) {
  std::vector<std::uint16_t> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    words[i] = get_u16(in, at + 2 * i);
  }
  return words;
}

}  // namespace

Header Header::response_header() const {
  return Header{0xC0, 0x00, gct, sna, sa1, sa2, dna, da1, da2, sid};
}

MemoryAreaWrite MemoryAreaWrite::of(std::uint16_t address, std::span<const std::uint16_t> words) {
  return MemoryAreaWrite{kAreaDmWord, address, 0, static_cast<std::uint16_t>(words.size()),
                         std::vector<std::uint16_t>(words.begin(), words.end())};
}

std::uint16_t Request::command_code() const {
  return std::holds_alternative<MemoryAreaRead>(command) ? kMemoryAreaRead : kMemoryAreaWrite;
}

Bytes encode_frame(const Request& request) {
  Bytes out;
  out.reserve(kBodyOffset + 6);
  put_header(out, request.header);
  put_u16(out, request.command_code());
  if (const auto* read = std::get_if<MemoryAreaRead>(&request.command)) {
    if (read->count == 0) {
      throw EncodeError("memory area read with count 0");
    }
    put_u8(out, read->area);
    put_u16(out, read->address);
    put_u8(out, read->bit);
    put_u16(out, read->count);
  } else {
    const auto& write = std::get<MemoryAreaWrite>(request.command);
    if (write.count == 0) {
      throw EncodeError("memory area write with count 0");
    }
    if (write.words.size() != write.count) {
      throw EncodeError("memory area write count " + std::to_string(write.count) + " but " +
                        std::to_string(write.words.size()) + " words supplied");
    }
    put_u8(out, write.area);
    put_u16(out, write.address);
    put_u8(out, write.bit);
    put_u16(out, write.count);
    put_words(out, write.words);
  }
  return out;
}

Bytes encode_frame(const Response& response) {
  if (response.command_code != kMemoryAreaRead && response.command_code != kMemoryAreaWrite) {
    throw EncodeError("unsupported command code in response");
  }
  if (!response.payload.empty() &&
      (response.end_code != end_code::kNormal || response.command_code == kMemoryAreaWrite)) {
    throw EncodeError("payload only allowed on a successful read response");
  }
  Bytes out;
  out.reserve(kBodyOffset + 2 + 2 * response.payload.size());
  put_header(out, response.header);
  put_u16(out, response.command_code);
  put_u16(out, response.end_code);
  put_words(out, response.payload);
  return out;
}

Bytes encode_frame(const Frame& frame) {
  return std::visit([](const auto& f) { return encode_frame(f); }, frame);
}

Frame decode_frame(ByteView in) {
  if (in.size() < kHeaderSize) {
    fail(Kind::TruncatedHeader, in.size());
  }
  const Header header = get_header(in);
  if (in.size() < kBodyOffset) {
    fail(Kind::TruncatedCommand, in.size());
  }
  const std::uint16_t code = get_u16(in, kCommandOffset);
  if (code != kMemoryAreaRead && code != kMemoryAreaWrite) {
    fail(Kind::UnsupportedCommand, kCommandOffset);
  }

  if (header.is_response()) {
    if (in.size() < kBodyOffset + 2) {
      fail(Kind::TruncatedBody, in.size());
    }
    Response r{header, code, get_u16(in, kBodyOffset), {}};
    const std::size_t payload_at = kBodyOffset + 2;
    const std::size_t rest = in.size() - payload_at;
    if (rest != 0 && (code == kMemoryAreaWrite || r.end_code != end_code::kNormal)) {
      fail(Kind::TrailingBytes, payload_at);
    }
    if (rest % 2 != 0) {
      fail(Kind::OddPayload, in.size() - 1);
    }
    r.payload = get_words(in, payload_at, rest / 2);
    return r;
  }

  constexpr std::size_t kAddressingSize = 6;  // area, address, bit, count
  if (in.size() < kBodyOffset + kAddressingSize) {
    fail(Kind::TruncatedBody, in.size());
  }
  const std::uint8_t area = in[kBodyOffset];
  const std::uint16_t address = get_u16(in, kBodyOffset + 1);
  const std::uint8_t bit = in[kBodyOffset + 3];
  const std::uint16_t count = get_u16(in, kBodyOffset + 4);
  const std::size_t data_at = kBodyOffset + kAddressingSize;
  if (count == 0) {
    fail(Kind::InvalidCount, kBodyOffset + 4);
  }

  if (code == kMemoryAreaRead) {
    if (in.size() > data_at) {
      fail(Kind::TrailingBytes, data_at);
    }
    return Request{header, MemoryAreaRead{area, address, bit, count}};
  }

  const std::size_t rest = in.size() - data_at;
  if (rest % 2 != 0) {
    fail(Kind::OddPayload, in.size() - 1);
  }
  if (rest / 2 < count) {
    fail(Kind::TruncatedBody, in.size());
  }
  if (rest / 2 > count) {
    fail(Kind::TrailingBytes, data_at + 2 * std::size_t{count});
  }
  return Request{header, MemoryAreaWrite{area, address, bit, count, get_words(in, data_at, count)}};
}

std::array<std::uint16_t, kLrealWords> lreal_to_words(double value) {
  const std::uint64_t bits = bits_of(value);
  return {static_cast<std::uint16_t>(bits >> 48), static_cast<std::uint16_t>(bits >> 32),
          static_cast<std::uint16_t>(bits >> 16), static_cast<std::uint16_t>(bits)};
}

double words_to_lreal(std::span<const std::uint16_t> words) {
  if (words.size() != kLrealWords) {
    throw FormatError("LREAL needs exactly 4 DM words, got " + std::to_string(words.size()));
  }
  std::uint64_t bits = 0;
  for (std::uint16_t w : words) {
    bits = (bits << 16) | w;
  }
  return double_from_bits(bits);
}

}  // namespace plcbench::fins

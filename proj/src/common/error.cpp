// SPDX-License-Identifier: Apache-2.0

#include "plcbench/common/error.hpp"

namespace plcbench {

DecodeError::DecodeError(Kind kind, std::size_t offset, const std::string& what)
    : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

const char* to_string(DecodeError::Kind kind) noexcept {
  switch (kind) {
    case DecodeError::Kind::TruncatedHeader: return "truncated header";
    case DecodeError::Kind::TruncatedCommand: return "truncated command";
    case DecodeError::Kind::TruncatedBody: return "truncated body";
    case DecodeError::Kind::UnsupportedCommand: return "unsupported command";
    case DecodeError::Kind::TrailingBytes: return "trailing bytes";
    case DecodeError::Kind::OddPayload: return "odd payload length";
    case DecodeError::Kind::InvalidCount: return "invalid count";
    case DecodeError::Kind::InvalidField: return "invalid field";
  }
  return "unknown";
}

RemoteError::RemoteError(std::uint16_t code, const std::string& what) : Error(what), code_(code) {}

}  // namespace plcbench

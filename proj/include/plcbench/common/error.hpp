// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace plcbench {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "failed" from "ok" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StartupError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

/// Wire decode failure. `offset` is the byte position where decoding gave up.
class DecodeError : public Error {
 public:
  enum class Kind {
    TruncatedHeader,
    TruncatedCommand,
    TruncatedBody,
    UnsupportedCommand,
    TrailingBytes,
    OddPayload,
    InvalidCount,
    InvalidField,
  };

  DecodeError(Kind kind, std::size_t offset, const std::string& what);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

const char* to_string(DecodeError::Kind kind) noexcept;

/// A peer answered with a non-success status code.
class RemoteError : public Error {
 public:
  RemoteError(std::uint16_t code, const std::string& what);
  [[nodiscard]] std::uint16_t code() const noexcept { return code_; }

 private:
  std::uint16_t code_;
};

class NameError : public Error {
 public:
  using Error::Error;
};

class DirectionError : public Error {
 public:
  using Error::Error;
};

class NotReadyError : public Error {
 public:
  using Error::Error;
};

class QualityError : public Error {
 public:
  using Error::Error;
};

class ConnectionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace plcbench

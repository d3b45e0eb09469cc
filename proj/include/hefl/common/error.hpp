// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hefl {

/// Error classes. The numeric values double as CLI exit codes.
enum class ErrorCategory : int {
  usage = 2,
  config = 3,
  crypto = 4,
  numeric = 5,
  io = 6,
};

const char* to_string(ErrorCategory category);

class Error : public std::exception {
 public:
  Error(ErrorCategory category, std::string message);

  const char* what() const noexcept override { return message_.c_str(); }
  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

  // Prefixes the message in place so a caught error can be rethrown with `throw;`
  // without slicing the concrete type.
  void add_context(const std::string& context);

 private:
  ErrorCategory category_;
  std::string message_;
};

class UsageError : public Error {
 public:
  explicit UsageError(std::string message) : Error(ErrorCategory::usage, std::move(message)) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string message) : Error(ErrorCategory::config, std::move(message)) {}
};

class IoError : public Error {
 public:
  explicit IoError(std::string message) : Error(ErrorCategory::io, std::move(message)) {}
};

/// Malformed binary input. `offset` is the byte position where parsing failed.
class ParseError : public IoError {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Non-finite values encountered during training, scoring or attack.
class NumericError : public Error {
 public:
  NumericError(std::string where, const std::string& message);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Federated-protocol violations such as clients disagreeing on the round mask.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(std::string message) : Error(ErrorCategory::crypto, std::move(message)) {}
};

}  // namespace hefl

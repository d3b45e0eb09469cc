// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/common/error.hpp"

namespace hefl {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::usage:
      return "usage";
    case ErrorCategory::config:
      return "config";
    case ErrorCategory::crypto:
      return "crypto";
    case ErrorCategory::numeric:
      return "numeric";
    case ErrorCategory::io:
      return "io";
  }
  return "unknown";
}

Error::Error(ErrorCategory category, std::string message)
    : category_(category), message_(std::move(message)) {}

void Error::add_context(const std::string& context) {
  message_ = context + ": " + message_;
}

ParseError::ParseError(std::size_t offset, const std::string& message)
    : IoError("parse error at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}

NumericError::NumericError(std::string where, const std::string& message)
    : Error(ErrorCategory::numeric, message + " (in " + where + ")"), where_(std::move(where)) {}

}  // namespace hefl

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hefl/common/error.hpp"

namespace hefl::ckks {

enum class CkksErrc {
  usage,            // wrong domain, level or scale for the operation
  range,            // value does not fit the modulus headroom
  depth_exhausted,  // no level left for multiply or rescale
  integrity,        // noise budget exhausted, decryption would be garbage
};

const char* to_string(CkksErrc code);

class CkksError : public Error {
 public:
  CkksError(CkksErrc code, const std::string& message);
  CkksErrc code() const noexcept { return code_; }

 private:
  CkksErrc code_;
};

}  // namespace hefl::ckks

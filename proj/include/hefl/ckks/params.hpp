// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hefl/ckks/modarith.hpp"

namespace hefl::ckks {

/**
 * Leveled CKKS parameter set.
 *
 * The chain is ordered q_0, q_1, ..., q_L. The last prime is the key-level
 * (special) prime: keys live modulo the whole chain, fresh encryptions are
 * produced there and immediately divided down by q_L, which shrinks the
 * encryption noise by a factor q_L. Ciphertexts therefore start at level L-1
 * and every rescale drops the current top prime. The paper-128 chain
 * 60 + 52 + 60 thus supports exactly one multiply followed by one rescale.
 */
struct CkksParams {
  std::size_t ring_dim = 0;
  std::vector<u64> modulus_chain;
  double log_scale = 0.0;
  /// Declared total modulus size, checked against the actual primes.
  int q_bits = 0;
  std::string security_profile = "custom";

  /// Named profiles: "paper-128" (N=8192, 60+52+60, 2^52) and
  /// "test-small" (N=1024, 40+30+40, 2^30).
  static CkksParams from_profile(std::string_view name);

  /// Builds a chain with the given prime bit sizes, largest NTT primes first.
  static CkksParams generate(std::size_t ring_dim, const std::vector<int>& prime_bits,
                             double log_scale, std::string profile = "custom");

  static const std::vector<std::string>& profile_names();

  /// Throws CkksError(usage) on any broken invariant.
  void validate() const;

  std::size_t slot_count() const { return ring_dim / 2; }
  std::size_t level_count() const { return modulus_chain.size(); }
  /// Level of fresh ciphertexts and encoded plaintexts.
  std::size_t data_level() const { return modulus_chain.size() - 2; }
  /// Level the keys are generated at.
  std::size_t key_level() const { return modulus_chain.size() - 1; }
  double scale() const;

  /// 64-bit parameter fingerprint. The top byte is log2(ring_dim); the rest
  /// is an FNV-1a hash of ring_dim, the chain and the scale.
  std::uint64_t fingerprint() const;
};

/// log2(N) encoded in the top byte of a fingerprint.
inline unsigned fingerprint_log_ring_dim(std::uint64_t fp) { return static_cast<unsigned>(fp >> 56); }

}  // namespace hefl::ckks

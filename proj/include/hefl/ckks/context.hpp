// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hefl/ckks/ntt.hpp"
#include "hefl/ckks/params.hpp"

namespace hefl::ckks {

/**
 * Validated parameters plus every precomputed table the scheme needs.
 * Immutable after construction and safe to share between threads.
 */
class CkksContext {
 public:
  explicit CkksContext(CkksParams params);

  static std::shared_ptr<const CkksContext> create(CkksParams params) {
    return std::make_shared<const CkksContext>(std::move(params));
  }

  CkksContext(const CkksContext&) = delete;
  CkksContext& operator=(const CkksContext&) = delete;

  const CkksParams& params() const { return params_; }
  std::size_t ring_dim() const { return params_.ring_dim; }
  std::size_t slot_count() const { return params_.slot_count(); }
  std::size_t data_level() const { return params_.data_level(); }
  std::size_t key_level() const { return params_.key_level(); }
  double scale() const { return params_.scale(); }
  std::uint64_t fingerprint() const { return fingerprint_; }

  u64 modulus(std::size_t i) const { return params_.modulus_chain[i]; }
  const NttTables& ntt(std::size_t i) const { return ntt_[i]; }

  /// q_dropped^-1 mod q_i, for i < dropped.
  u64 inv_prime(std::size_t dropped, std::size_t i) const { return inv_prime_[dropped][i]; }
  /// (q_0 ... q_{j-1}) mod q_i, for j <= i.
  u64 prefix_product_mod(std::size_t i, std::size_t j) const { return prefix_mod_[i][j]; }
  /// ((q_0 ... q_{i-1}) mod q_i)^-1.
  u64 prefix_product_inv(std::size_t i) const { return prefix_inv_[i]; }

  /// log2 of q_0 * ... * q_level.
  double log2_modulus(std::size_t level) const { return log2_prefix_[level]; }

  /// exp(2 pi i k / 2N) for k in [0, 2N].
  std::span<const std::complex<double>> root_powers() const { return roots_; }
  /// 5^j mod 2N for j < N/2.
  std::span<const std::size_t> rotation_group() const { return rot_group_; }

 private:
  CkksParams params_;
  std::uint64_t fingerprint_;
  std::vector<NttTables> ntt_;
  std::vector<std::vector<u64>> inv_prime_;
  std::vector<std::vector<u64>> prefix_mod_;
  std::vector<u64> prefix_inv_;
  std::vector<double> log2_prefix_;
  std::vector<std::complex<double>> roots_;
  std::vector<std::size_t> rot_group_;
};

}  // namespace hefl::ckks

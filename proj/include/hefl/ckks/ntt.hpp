// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hefl/ckks/modarith.hpp"

namespace hefl::ckks {

/**
 * Negacyclic number-theoretic transform over Z_q[X]/(X^n + 1).
 *
 * Forward is a Cooley-Tukey pass with the 2n-th root psi folded into the
 * twiddles, so no separate pre-scaling by powers of psi is needed. Output is
 * in bit-reversed order: slot i holds a(psi^(2*bitrev(i)+1)). Inverse is the
 * matching Gentleman-Sande pass followed by scaling with n^-1.
 * Inputs and outputs are fully reduced.
 */
class NttTables {
 public:
  NttTables(std::size_t n, u64 q);

  std::size_t size() const { return n_; }
  u64 modulus() const { return q_; }
  /// The primitive 2n-th root used by the transform (the smallest one).
  u64 psi() const { return psi_; }

  void forward(std::span<u64> a) const;
  void inverse(std::span<u64> a) const;

 private:
  std::size_t n_;
  int log_n_;
  u64 q_;
  u64 psi_;
  std::vector<u64> psi_rev_;
  std::vector<u64> psi_rev_quot_;
  std::vector<u64> psi_inv_rev_;
  std::vector<u64> psi_inv_rev_quot_;
  u64 n_inv_;
  u64 n_inv_quot_;
};

std::size_t bit_reverse(std::size_t x, int bits);

}  // namespace hefl::ckks

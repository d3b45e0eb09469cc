// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/ntt.hpp"

#include <bit>
#include <string>

#include "hefl/ckks/error.hpp"

namespace hefl::ckks {

std::size_t bit_reverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

NttTables::NttTables(std::size_t n, u64 q) : n_(n), q_(q) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw CkksError(CkksErrc::usage, "NTT size must be a power of two, got " + std::to_string(n));
  }
  if (q >= (u64{1} << 62)) throw CkksError(CkksErrc::usage, "NTT modulus must be below 2^62");
  log_n_ = std::countr_zero(n);
  psi_ = minimal_primitive_root(2 * n, q);
  const u64 psi_inv = inv_mod(psi_, q);

  psi_rev_.resize(n);
  psi_inv_rev_.resize(n);
  psi_rev_quot_.resize(n);
  psi_inv_rev_quot_.resize(n);
  u64 pw = 1;
  u64 pw_inv = 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = bit_reverse(i, log_n_);
    psi_rev_[r] = pw;
    psi_inv_rev_[r] = pw_inv;
    pw = mul_mod(pw, psi_, q);
    pw_inv = mul_mod(pw_inv, psi_inv, q);
  }
  for (std::size_t i = 0; i < n; ++i) {
    psi_rev_quot_[i] = shoup_quotient(psi_rev_[i], q);
    psi_inv_rev_quot_[i] = shoup_quotient(psi_inv_rev_[i], q);
  }
  n_inv_ = inv_mod(static_cast<u64>(n), q);
  n_inv_quot_ = shoup_quotient(n_inv_, q);
}

void NttTables::forward(std::span<u64> a) const {
  if (a.size() != n_) throw CkksError(CkksErrc::usage, "NTT input length mismatch");
  const u64 q = q_;
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const u64 w = psi_rev_[m + i];
      const u64 wq = psi_rev_quot_[m + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const u64 u = x[j];
        const u64 v = mul_shoup(y[j], w, wq, q);
        x[j] = add_mod(u, v, q);
        y[j] = sub_mod(u, v, q);
      }
    }
  }
}

void NttTables::inverse(std::span<u64> a) const {
  if (a.size() != n_) throw CkksError(CkksErrc::usage, "NTT input length mismatch");
  const u64 q = q_;
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const u64 w = psi_inv_rev_[h + i];
      const u64 wq = psi_inv_rev_quot_[h + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const u64 u = x[j];
        const u64 v = y[j];
        x[j] = add_mod(u, v, q);
        y[j] = mul_shoup(sub_mod(u, v, q), w, wq, q);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& v : a) v = mul_shoup(v, n_inv_, n_inv_quot_, q);
}

}  // namespace hefl::ckks

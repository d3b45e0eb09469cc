// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hefl/ckks/modarith.hpp"

namespace hefl::ckks {

class CkksContext;

enum class Domain : std::uint8_t { coefficient, ntt };

/**
 * Polynomial in R_Q held as one residue array per prime q_0..q_level.
 * Storage is a single contiguous buffer, residue-major.
 */
class RnsPoly {
 public:
  RnsPoly() = default;
  RnsPoly(std::size_t ring_dim, std::size_t level, Domain domain);

  std::size_t ring_dim() const { return ring_dim_; }
  std::size_t level() const { return level_; }
  std::size_t residue_count() const { return level_ + 1; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  std::span<u64> residue(std::size_t i) { return {coeffs_.data() + i * ring_dim_, ring_dim_}; }
  std::span<const u64> residue(std::size_t i) const {
    return {coeffs_.data() + i * ring_dim_, ring_dim_};
  }
  std::span<const u64> data() const { return coeffs_; }

  /// Drops residues above `level`. Only valid when no rounding is wanted.
  void truncate(std::size_t level);

  friend bool operator==(const RnsPoly&, const RnsPoly&) = default;

 private:
  std::size_t ring_dim_ = 0;
  std::size_t level_ = 0;
  Domain domain_ = Domain::coefficient;
  std::vector<u64> coeffs_;
};

/// Lifts signed integer coefficients to residues at `level`.
RnsPoly lift_signed(const CkksContext& ctx, std::span<const std::int64_t> coeffs, std::size_t level);

RnsPoly ntt_forward(const CkksContext& ctx, RnsPoly p);
RnsPoly ntt_inverse(const CkksContext& ctx, RnsPoly p);

RnsPoly poly_add(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b);
RnsPoly poly_sub(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b);
RnsPoly poly_negate(const CkksContext& ctx, const RnsPoly& a);
/// Pointwise product; both operands in the NTT domain.
RnsPoly poly_mul_ntt(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b);
/// Multiplies every residue i by scalars[i].
RnsPoly poly_mul_scalar(const CkksContext& ctx, const RnsPoly& a, std::span<const u64> scalars);
/// Negacyclic product of two coefficient-domain polynomials via the NTT.
RnsPoly poly_multiply(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b);

/**
 * Divides a coefficient-domain polynomial by its top prime with rounding and
 * drops that residue: returns round(a / q_level) at level - 1.
 */
RnsPoly drop_last_prime(const CkksContext& ctx, const RnsPoly& a);

/**
 * Exact centered CRT reconstruction of coefficient k, as long double.
 * Uses mixed-radix (Garner) digits, so it is exact whenever the result
 * magnitude is below 2^64.
 */
long double centered_coefficient(const CkksContext& ctx, const RnsPoly& p, std::size_t k);

}  // namespace hefl::ckks

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hefl/ckks/context.hpp"
#include "hefl/ckks/rns_poly.hpp"

namespace hefl::ckks {

struct Plaintext {
  RnsPoly poly;  // coefficient domain
  double scale = 0.0;

  std::size_t level() const { return poly.level(); }
  std::size_t slot_count() const { return poly.ring_dim() / 2; }
};

/**
 * Packs up to N/2 reals into the slots of a plaintext polynomial.
 *
 * Slot j corresponds to evaluation at zeta^(5^j), zeta = exp(i*pi/N). The
 * coefficients are round-half-to-even of scale * (inverse embedding), and
 * must fit below q_0 / 2 so the value survives down to the last level.
 * Missing slots are zero. Level defaults to the context's data level.
 */
Plaintext encode(const CkksContext& ctx, std::span<const double> values, double scale,
                 std::optional<std::size_t> level = std::nullopt);
Plaintext encode(const CkksContext& ctx, std::span<const double> values);

/// Real parts of all N/2 slots.
std::vector<double> decode(const CkksContext& ctx, const Plaintext& pt);

/**
 * Worst-case slot error of an encode/decode roundtrip for |v| <= max_abs:
 * coefficient rounding contributes at most N/(2*scale), double-precision
 * FFT work a further 64*N*max_abs*2^-52.
 */
double encoding_error_bound(std::size_t ring_dim, double scale, double max_abs = 1.0);

/// In-place canonical-embedding transforms on N/2 complex values.
void embed_inverse(const CkksContext& ctx, std::vector<std::complex<double>>& values);
void embed_forward(const CkksContext& ctx, std::vector<std::complex<double>>& values);

}  // namespace hefl::ckks

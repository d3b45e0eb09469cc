// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "hefl/ckks/context.hpp"
#include "hefl/ckks/encoder.hpp"
#include "hefl/ckks/rns_poly.hpp"

namespace hefl::ckks {

/// Error distribution: rounded Gaussian, sigma 3.2, rejected beyond 6 sigma.
inline constexpr double kErrorSigma = 3.2;
inline constexpr double kErrorTailCut = 6.0;

/// Uniform ternary secret, kept in the NTT domain at the key level.
struct SecretKey {
  RnsPoly s;
};

/// (b, a) with b = -a*s + e, both in the NTT domain at the key level.
struct PublicKey {
  RnsPoly b;
  RnsPoly a;
};

struct KeyPair {
  SecretKey secret_key;
  PublicKey public_key;
};

/**
 * Two-component ciphertext in the coefficient domain. `noise_budget_bits` is
 * a diagnostic estimate of the remaining headroom, log2(Q_l / 2) minus
 * log2(scale) minus the magnitude growth accumulated by additions and scalar
 * products. It carries no security meaning.
 */
struct Ciphertext {
  RnsPoly c0;
  RnsPoly c1;
  double scale = 0.0;
  double noise_budget_bits = 0.0;

  std::size_t level() const { return c0.level(); }
};

KeyPair keygen(const CkksContext& ctx, std::uint64_t seed);

/// Fresh encryption of a data-level plaintext. Result is at the data level
/// with the plaintext's scale.
Ciphertext encrypt(const CkksContext& ctx, const Plaintext& pt, const PublicKey& pk,
                   std::uint64_t seed);

/// Throws CkksError(integrity) when the budget estimate is exhausted.
Plaintext decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk);

/// Requires identical level and scale.
Ciphertext he_add(const CkksContext& ctx, const Ciphertext& a, const Ciphertext& b);

/**
 * Multiplies every slot by `scalar`, encoded as round(scalar * scale). The
 * ciphertext scale grows by the context scale until the next rescale.
 */
Ciphertext he_mul_scalar(const CkksContext& ctx, const Ciphertext& ct, double scalar);

/// Divides by the top prime and drops it; scale is divided by that prime.
Ciphertext rescale(const CkksContext& ctx, const Ciphertext& ct);

/// Headroom estimate for a fresh ciphertext at `level` with `scale`.
double fresh_noise_budget(const CkksContext& ctx, std::size_t level, double scale);

}  // namespace hefl::ckks

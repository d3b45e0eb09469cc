// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hefl::ckks {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// All moduli are odd primes below 2^62, so a + b never wraps.

inline u64 add_mod(u64 a, u64 b, u64 q) {
  u64 s = a + b;
  return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>(static_cast<u128>(a) * b % q);
}

/// floor(w * 2^64 / q), the precomputed quotient for Shoup multiplication.
inline u64 shoup_quotient(u64 w, u64 q) {
  return static_cast<u64>((static_cast<u128>(w) << 64) / q);
}

/// a * w mod q using the precomputed quotient of w. Requires w < q < 2^63.
inline u64 mul_shoup(u64 a, u64 w, u64 w_quot, u64 q) {
  u64 hi = static_cast<u64>((static_cast<u128>(a) * w_quot) >> 64);
  u64 r = a * w - hi * q;
  return r >= q ? r - q : r;
}

/// Reduces a signed value into [0, q).
inline u64 reduce_signed(std::int64_t v, u64 q) {
  if (v >= 0) return static_cast<u64>(v) % q;
  u64 m = static_cast<u64>(-(v + 1)) % q;  // avoids overflow at INT64_MIN
  return q - 1 - m;
}

/// Centered representative in (-q/2, q/2].
inline std::int64_t center(u64 a, u64 q) {
  return a > q / 2 ? -static_cast<std::int64_t>(q - a) : static_cast<std::int64_t>(a);
}

u64 pow_mod(u64 base, u64 exp, u64 q);

/// Inverse modulo a prime q (Fermat).
u64 inv_mod(u64 a, u64 q);

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

/// Smallest primitive 2n-th root of unity modulo q. Requires q = 1 (mod 2n).
u64 minimal_primitive_root(std::size_t two_n, u64 q);

/**
 * Primes p = 1 (mod 2n) with exactly `bits` bits, searched downward from 2^bits.
 * Primes listed in `exclude` are skipped so a chain can repeat a bit size.
 */
std::vector<u64> ntt_primes(int bits, std::size_t n, std::size_t count,
                            const std::vector<u64>& exclude = {});

}  // namespace hefl::ckks

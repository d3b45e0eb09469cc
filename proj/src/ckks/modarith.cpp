// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/modarith.hpp"

#include <algorithm>
#include <string>

#include "hefl/ckks/error.hpp"

namespace hefl::ckks {

const char* to_string(CkksErrc code) {
  switch (code) {
    case CkksErrc::usage:
      return "usage";
    case CkksErrc::range:
      return "range";
    case CkksErrc::depth_exhausted:
      return "depth-exhausted";
    case CkksErrc::integrity:
      return "integrity";
  }
  return "unknown";
}

CkksError::CkksError(CkksErrc code, const std::string& message)
    : Error(ErrorCategory::crypto, std::string("ckks ") + to_string(code) + ": " + message),
      code_(code) {}

u64 pow_mod(u64 base, u64 exp, u64 q) {
  u64 result = 1 % q;
  base %= q;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

u64 inv_mod(u64 a, u64 q) {
  if (a % q == 0) throw CkksError(CkksErrc::usage, "zero has no modular inverse");
  return pow_mod(a, q - 2, q);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 minimal_primitive_root(std::size_t two_n, u64 q) {
  if ((q - 1) % two_n != 0) {
    throw CkksError(CkksErrc::usage, "modulus " + std::to_string(q) + " is not 1 mod " +
                                         std::to_string(two_n));
  }
  const u64 cofactor = (q - 1) / two_n;
  const u64 half = two_n / 2;
  u64 root = 0;
  for (u64 g = 2; g < q; ++g) {
    u64 cand = pow_mod(g, cofactor, q);
    // cand has order dividing 2n; it is primitive iff cand^n = -1.
    if (pow_mod(cand, half, q) == q - 1) {
      root = cand;
      break;
    }
  }
  if (root == 0) throw CkksError(CkksErrc::usage, "no primitive root found");
  // Odd powers of a primitive root enumerate all primitive roots; take the least.
  const u64 sq = mul_mod(root, root, q);
  u64 best = root;
  u64 cur = root;
  for (std::size_t i = 1; i < half; ++i) {
    cur = mul_mod(cur, sq, q);
    best = std::min(best, cur);
  }
  return best;
}

std::vector<u64> ntt_primes(int bits, std::size_t n, std::size_t count,
                            const std::vector<u64>& exclude) {
  if (bits < 2 || bits > 61) throw CkksError(CkksErrc::usage, "prime bit size out of range");
  const u64 step = 2 * static_cast<u64>(n);
  const u64 upper = u64{1} << bits;
  const u64 lower = u64{1} << (bits - 1);
  std::vector<u64> out;
  // Largest candidate below 2^bits of the form k*2n + 1.
  u64 cand = ((upper - 1) / step) * step + 1;
  if (cand >= upper) cand -= step;
  while (out.size() < count && cand > lower) {
    if (is_prime(cand) && std::find(exclude.begin(), exclude.end(), cand) == exclude.end()) {
      out.push_back(cand);
    }
    cand -= step;
  }
  if (out.size() < count) {
    throw CkksError(CkksErrc::usage, "not enough " + std::to_string(bits) +
                                         "-bit NTT primes for n=" + std::to_string(n));
  }
  return out;
}

}  // namespace hefl::ckks

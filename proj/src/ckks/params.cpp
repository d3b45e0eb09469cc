// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/params.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "hefl/ckks/error.hpp"
#include "hefl/common/error.hpp"

namespace hefl::ckks {

const std::vector<std::string>& CkksParams::profile_names() {
  static const std::vector<std::string> names{"paper-128", "test-small"};
  return names;
}

CkksParams CkksParams::from_profile(std::string_view name) {
  if (name == "paper-128") return generate(8192, {60, 52, 60}, 52.0, "paper-128");
  if (name == "test-small") return generate(1024, {40, 30, 40}, 30.0, "test-small");
  throw ConfigError("unknown ckks profile '" + std::string(name) +
                    "' (expected paper-128 or test-small)");
}

CkksParams CkksParams::generate(std::size_t ring_dim, const std::vector<int>& prime_bits,
                                double log_scale, std::string profile) {
  CkksParams p;
  p.ring_dim = ring_dim;
  p.log_scale = log_scale;
  p.security_profile = std::move(profile);
  for (int bits : prime_bits) {
    p.modulus_chain.push_back(ntt_primes(bits, ring_dim, 1, p.modulus_chain).front());
    p.q_bits += bits;
  }
  p.validate();
  return p;
}

void CkksParams::validate() const {
  if (ring_dim < 8 || !std::has_single_bit(ring_dim)) {
    throw CkksError(CkksErrc::usage, "ring dimension must be a power of two >= 8");
  }
  if (modulus_chain.size() < 2) {
    throw CkksError(CkksErrc::usage, "modulus chain needs a data prime and a key-level prime");
  }
  if (modulus_chain.size() > 255) throw CkksError(CkksErrc::usage, "modulus chain too long");
  const u64 two_n = 2 * static_cast<u64>(ring_dim);
  int total_bits = 0;
  for (std::size_t i = 0; i < modulus_chain.size(); ++i) {
    const u64 q = modulus_chain[i];
    if (q >= (u64{1} << 61) || !is_prime(q)) {
      throw CkksError(CkksErrc::usage, "chain entry " + std::to_string(i) + " is not a prime below 2^61");
    }
    if (q % two_n != 1) {
      throw CkksError(CkksErrc::usage, "chain entry " + std::to_string(i) + " is not 1 mod 2N");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (modulus_chain[j] == q) throw CkksError(CkksErrc::usage, "chain primes must be distinct");
    }
    total_bits += std::bit_width(q);
  }
  if (total_bits != q_bits) {
    throw CkksError(CkksErrc::usage, "chain has " + std::to_string(total_bits) +
                                         " bits but " + std::to_string(q_bits) + " were declared");
  }
  if (!(log_scale > 0.0)) throw CkksError(CkksErrc::usage, "scale must be positive");
  // A b-bit prime is below 2^b, so the scale is compared against 2^b.
  for (std::size_t i = 1; i + 1 < modulus_chain.size(); ++i) {
    if (log_scale > static_cast<double>(std::bit_width(modulus_chain[i]))) {
      throw CkksError(CkksErrc::usage, "scale exceeds middle prime " + std::to_string(i));
    }
  }
  if (log_scale >= static_cast<double>(std::bit_width(modulus_chain.front()))) {
    throw CkksError(CkksErrc::usage, "scale leaves no headroom in the base prime");
  }
}

double CkksParams::scale() const { return std::exp2(log_scale); }

std::uint64_t CkksParams::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(ring_dim);
  feed(modulus_chain.size());
  for (u64 q : modulus_chain) feed(q);
  std::uint64_t scale_bits;
  std::memcpy(&scale_bits, &log_scale, sizeof scale_bits);
  feed(scale_bits);
  const std::uint64_t log_n = static_cast<std::uint64_t>(std::countr_zero(ring_dim));
  return (log_n << 56) | (h & 0x00ffffffffffffffULL);
}

}  // namespace hefl::ckks

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/scheme.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hefl/ckks/error.hpp"
#include "hefl/common/rng.hpp"

namespace hefl::ckks {

namespace {

std::vector<std::int64_t> sample_ternary(Rng& rng, std::size_t n) {
  std::vector<std::int64_t> out(n);
  for (auto& v : out) v = static_cast<std::int64_t>(rng.uniform_below(3)) - 1;
  return out;
}

std::vector<std::int64_t> sample_error(Rng& rng, std::size_t n) {
  const double bound = kErrorSigma * kErrorTailCut;
  std::vector<std::int64_t> out(n);
  for (auto& v : out) {
    double x;
    do {
      x = kErrorSigma * rng.normal();
    } while (std::fabs(x) > bound);
    v = static_cast<std::int64_t>(std::nearbyint(x));
  }
  return out;
}

RnsPoly sample_uniform(const CkksContext& ctx, Rng& rng, std::size_t level, Domain domain) {
  RnsPoly p(ctx.ring_dim(), level, domain);
  for (std::size_t i = 0; i <= level; ++i) {
    const u64 q = ctx.modulus(i);
    for (auto& v : p.residue(i)) v = rng.uniform_below(q);
  }
  return p;
}

void require_context(const CkksContext& ctx, const RnsPoly& p, const char* what) {
  if (p.ring_dim() != ctx.ring_dim()) {
    throw CkksError(CkksErrc::usage, std::string(what) + " belongs to a different ring dimension");
  }
}

RnsPoly truncated(RnsPoly p, std::size_t level) {
  p.truncate(level);
  return p;
}

}  // namespace

double fresh_noise_budget(const CkksContext& ctx, std::size_t level, double scale) {
  return ctx.log2_modulus(level) - 1.0 - std::log2(scale);
}

KeyPair keygen(const CkksContext& ctx, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = ctx.ring_dim();
  const std::size_t top = ctx.key_level();
  RnsPoly s = ntt_forward(ctx, lift_signed(ctx, sample_ternary(rng, n), top));
  // A uniform polynomial is uniform in either domain, so sample `a` directly in NTT form.
  RnsPoly a = sample_uniform(ctx, rng, top, Domain::ntt);
  RnsPoly e = ntt_forward(ctx, lift_signed(ctx, sample_error(rng, n), top));
  RnsPoly b = poly_sub(ctx, e, poly_mul_ntt(ctx, a, s));
  return KeyPair{SecretKey{std::move(s)}, PublicKey{std::move(b), std::move(a)}};
}

Ciphertext encrypt(const CkksContext& ctx, const Plaintext& pt, const PublicKey& pk,
                   std::uint64_t seed) {
  require_context(ctx, pt.poly, "plaintext");
  require_context(ctx, pk.a, "public key");
  if (pt.level() != ctx.data_level()) {
    throw CkksError(CkksErrc::usage, "encrypt expects a plaintext at the data level " +
                                         std::to_string(ctx.data_level()));
  }
  if (pt.poly.domain() != Domain::coefficient) throw CkksError(CkksErrc::usage, "plaintext must be in coefficient domain");
  if (!(pt.scale > 0.0)) throw CkksError(CkksErrc::usage, "plaintext scale must be positive");
  if (pk.a.level() != ctx.key_level() || pk.b.level() != ctx.key_level()) {
    throw CkksError(CkksErrc::usage, "public key is not at the key level");
  }

  Rng rng(seed);
  const std::size_t n = ctx.ring_dim();
  const std::size_t top = ctx.key_level();
  RnsPoly u = ntt_forward(ctx, lift_signed(ctx, sample_ternary(rng, n), top));
  RnsPoly e0 = lift_signed(ctx, sample_error(rng, n), top);
  RnsPoly e1 = lift_signed(ctx, sample_error(rng, n), top);

  RnsPoly c0 = poly_add(ctx, ntt_inverse(ctx, poly_mul_ntt(ctx, pk.b, u)), e0);
  RnsPoly c1 = poly_add(ctx, ntt_inverse(ctx, poly_mul_ntt(ctx, pk.a, u)), e1);
  // Encrypting zero at the key level and dividing by the special prime leaves
  // only rounding noise in the data-level ciphertext.
  c0 = drop_last_prime(ctx, c0);
  c1 = drop_last_prime(ctx, c1);
  c0 = poly_add(ctx, c0, pt.poly);

  Ciphertext ct{std::move(c0), std::move(c1), pt.scale, 0.0};
  ct.noise_budget_bits = fresh_noise_budget(ctx, ct.level(), ct.scale);
  return ct;
}

Plaintext decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
  require_context(ctx, ct.c0, "ciphertext");
  if (ct.c0.level() != ct.c1.level()) throw CkksError(CkksErrc::usage, "ciphertext components disagree on level");
  if (ct.c0.domain() != Domain::coefficient || ct.c1.domain() != Domain::coefficient) {
    throw CkksError(CkksErrc::usage, "ciphertext must be in coefficient domain");
  }
  if (ct.level() > sk.s.level()) throw CkksError(CkksErrc::usage, "ciphertext level above the secret key");
  if (!(ct.noise_budget_bits > 0.0)) {
    throw CkksError(CkksErrc::integrity, "noise budget exhausted (" +
                                             std::to_string(ct.noise_budget_bits) + " bits)");
  }
  RnsPoly s = truncated(sk.s, ct.level());
  RnsPoly c1s = ntt_inverse(ctx, poly_mul_ntt(ctx, ntt_forward(ctx, ct.c1), s));
  return Plaintext{poly_add(ctx, ct.c0, c1s), ct.scale};
}

Ciphertext he_add(const CkksContext& ctx, const Ciphertext& a, const Ciphertext& b) {
  if (a.level() != b.level()) {
    throw CkksError(CkksErrc::usage, "he_add level mismatch: " + std::to_string(a.level()) +
                                         " vs " + std::to_string(b.level()));
  }
  if (a.scale != b.scale) throw CkksError(CkksErrc::usage, "he_add scale mismatch");
  Ciphertext out{poly_add(ctx, a.c0, b.c0), poly_add(ctx, a.c1, b.c1), a.scale, 0.0};
  out.noise_budget_bits = std::min(a.noise_budget_bits, b.noise_budget_bits) - 1.0;
  return out;
}

Ciphertext he_mul_scalar(const CkksContext& ctx, const Ciphertext& ct, double scalar) {
  if (ct.level() == 0) {
    throw CkksError(CkksErrc::depth_exhausted, "no level left for a multiplication");
  }
  const double encoded = scalar * ctx.scale();
  if (!std::isfinite(encoded) || std::fabs(encoded) >= 0x1.0p62) {
    throw CkksError(CkksErrc::range, "scalar does not fit the encoding range");
  }
  const double budget = ct.noise_budget_bits - std::log2(ctx.scale()) -
                        std::log2(std::max(1.0, std::fabs(scalar)));
  if (!(budget > 0.0)) {
    throw CkksError(CkksErrc::depth_exhausted, "product scale would overflow the modulus; rescale first");
  }
  const auto k = static_cast<std::int64_t>(std::nearbyint(encoded));
  std::vector<u64> residues(ct.level() + 1);
  for (std::size_t i = 0; i < residues.size(); ++i) residues[i] = reduce_signed(k, ctx.modulus(i));
  Ciphertext out{poly_mul_scalar(ctx, ct.c0, residues), poly_mul_scalar(ctx, ct.c1, residues),
                 ct.scale * ctx.scale(), budget};
  return out;
}

Ciphertext rescale(const CkksContext& ctx, const Ciphertext& ct) {
  if (ct.level() == 0) throw CkksError(CkksErrc::depth_exhausted, "cannot rescale at level 0");
  const double dropped = static_cast<double>(ctx.modulus(ct.level()));
  Ciphertext out{drop_last_prime(ctx, ct.c0), drop_last_prime(ctx, ct.c1), ct.scale / dropped,
                 ct.noise_budget_bits};
  return out;
}

}  // namespace hefl::ckks

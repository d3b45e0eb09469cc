// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/rns_poly.hpp"

#include "hefl/ckks/context.hpp"
#include "hefl/ckks/error.hpp"

namespace hefl::ckks {

RnsPoly::RnsPoly(std::size_t ring_dim, std::size_t level, Domain domain)
    : ring_dim_(ring_dim), level_(level), domain_(domain), coeffs_(ring_dim * (level + 1), 0) {}

void RnsPoly::truncate(std::size_t level) {
  if (level > level_) throw CkksError(CkksErrc::usage, "cannot raise level by truncation");
  level_ = level;
  coeffs_.resize(ring_dim_ * (level + 1));
}

namespace {

void require_compatible(const RnsPoly& a, const RnsPoly& b) {
  if (a.ring_dim() != b.ring_dim() || a.level() != b.level()) {
    throw CkksError(CkksErrc::usage, "polynomial level or ring dimension mismatch");
  }
  if (a.domain() != b.domain()) throw CkksError(CkksErrc::usage, "polynomial domain mismatch");
}

}  // namespace

RnsPoly lift_signed(const CkksContext& ctx, std::span<const std::int64_t> coeffs, std::size_t level) {
  if (coeffs.size() != ctx.ring_dim()) throw CkksError(CkksErrc::usage, "coefficient count mismatch");
  RnsPoly p(ctx.ring_dim(), level, Domain::coefficient);
  for (std::size_t i = 0; i <= level; ++i) {
    const u64 q = ctx.modulus(i);
    auto r = p.residue(i);
    for (std::size_t k = 0; k < coeffs.size(); ++k) r[k] = reduce_signed(coeffs[k], q);
  }
  return p;
}

RnsPoly ntt_forward(const CkksContext& ctx, RnsPoly p) {
  if (p.domain() != Domain::coefficient) {
    throw CkksError(CkksErrc::usage, "ntt_forward expects a coefficient-domain polynomial");
  }
  for (std::size_t i = 0; i < p.residue_count(); ++i) ctx.ntt(i).forward(p.residue(i));
  p.set_domain(Domain::ntt);
  return p;
}

RnsPoly ntt_inverse(const CkksContext& ctx, RnsPoly p) {
  if (p.domain() != Domain::ntt) {
    throw CkksError(CkksErrc::usage, "ntt_inverse expects an NTT-domain polynomial");
  }
  for (std::size_t i = 0; i < p.residue_count(); ++i) ctx.ntt(i).inverse(p.residue(i));
  p.set_domain(Domain::coefficient);
  return p;
}

RnsPoly poly_add(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b) {
  require_compatible(a, b);
  RnsPoly out = a;
  for (std::size_t i = 0; i < a.residue_count(); ++i) {
    const u64 q = ctx.modulus(i);
    auto o = out.residue(i);
    auto y = b.residue(i);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = add_mod(o[k], y[k], q);
  }
  return out;
}

RnsPoly poly_sub(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b) {
  require_compatible(a, b);
  RnsPoly out = a;
  for (std::size_t i = 0; i < a.residue_count(); ++i) {
    const u64 q = ctx.modulus(i);
    auto o = out.residue(i);
    auto y = b.residue(i);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = sub_mod(o[k], y[k], q);
  }
  return out;
}

RnsPoly poly_negate(const CkksContext& ctx, const RnsPoly& a) {
  RnsPoly out = a;
  for (std::size_t i = 0; i < a.residue_count(); ++i) {
    const u64 q = ctx.modulus(i);
    for (auto& v : out.residue(i)) v = neg_mod(v, q);
  }
  return out;
}

RnsPoly poly_mul_ntt(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b) {
  require_compatible(a, b);
  if (a.domain() != Domain::ntt) throw CkksError(CkksErrc::usage, "pointwise product needs NTT domain");
  RnsPoly out = a;
  for (std::size_t i = 0; i < a.residue_count(); ++i) {
    const u64 q = ctx.modulus(i);
    auto o = out.residue(i);
    auto y = b.residue(i);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = mul_mod(o[k], y[k], q);
  }
  return out;
}

RnsPoly poly_mul_scalar(const CkksContext& ctx, const RnsPoly& a, std::span<const u64> scalars) {
  if (scalars.size() < a.residue_count()) throw CkksError(CkksErrc::usage, "missing scalar residues");
  RnsPoly out = a;
  for (std::size_t i = 0; i < a.residue_count(); ++i) {
    const u64 q = ctx.modulus(i);
    const u64 s = scalars[i] % q;
    const u64 sq = shoup_quotient(s, q);
    for (auto& v : out.residue(i)) v = mul_shoup(v, s, sq, q);
  }
  return out;
}

RnsPoly poly_multiply(const CkksContext& ctx, const RnsPoly& a, const RnsPoly& b) {
  return ntt_inverse(ctx, poly_mul_ntt(ctx, ntt_forward(ctx, a), ntt_forward(ctx, b)));
}

RnsPoly drop_last_prime(const CkksContext& ctx, const RnsPoly& a) {
  if (a.domain() != Domain::coefficient) {
    throw CkksError(CkksErrc::usage, "prime dropping needs a coefficient-domain polynomial");
  }
  const std::size_t top = a.level();
  if (top == 0) throw CkksError(CkksErrc::depth_exhausted, "no prime left to drop");
  const u64 q_top = ctx.modulus(top);
  RnsPoly out = a;
  out.truncate(top - 1);
  auto last = a.residue(top);
  for (std::size_t i = 0; i < top; ++i) {
    const u64 qi = ctx.modulus(i);
    const u64 inv = ctx.inv_prime(top, i);
    const u64 inv_quot = shoup_quotient(inv, qi);
    auto r = out.residue(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      // Subtracting the centered remainder makes the division exact and rounds to nearest.
      const u64 rem = reduce_signed(center(last[k], q_top), qi);
      r[k] = mul_shoup(sub_mod(r[k], rem, qi), inv, inv_quot, qi);
    }
  }
  return out;
}

long double centered_coefficient(const CkksContext& ctx, const RnsPoly& p, std::size_t k) {
  if (p.domain() != Domain::coefficient) {
    throw CkksError(CkksErrc::usage, "CRT reconstruction needs coefficient domain");
  }
  const std::size_t count = p.residue_count();
  // Mixed-radix digits: x = a_0 + a_1 q_0 + a_2 q_0 q_1 + ...
  u64 digits[256];
  for (std::size_t i = 0; i < count; ++i) {
    const u64 qi = ctx.modulus(i);
    u64 acc = 0;
    for (std::size_t j = 0; j < i; ++j) {
      acc = add_mod(acc, mul_mod(digits[j] % qi, ctx.prefix_product_mod(i, j), qi), qi);
    }
    digits[i] = mul_mod(sub_mod(p.residue(i)[k], acc, qi), ctx.prefix_product_inv(i), qi);
  }
  // (Q-1)/2 has digits (q_i-1)/2, so the sign follows from a lexicographic
  // comparison starting at the most significant digit.
  bool upper_half = false;
  for (std::size_t i = count; i-- > 0;) {
    const u64 half = (ctx.modulus(i) - 1) / 2;
    if (digits[i] != half) {
      upper_half = digits[i] > half;
      break;
    }
  }
  if (upper_half) {
    // Q - x = (Q - 1 - x) + 1, and Q - 1 - x has digits q_i - 1 - a_i with no borrow.
    bool carry = true;
    for (std::size_t i = 0; i < count; ++i) {
      const u64 qi = ctx.modulus(i);
      u64 d = qi - 1 - digits[i];
      if (carry) {
        ++d;
        carry = (d == qi);
        if (carry) d = 0;
      }
      digits[i] = d;
    }
  }
  long double value = 0.0L;
  for (std::size_t i = count; i-- > 0;) {
    value = value * static_cast<long double>(ctx.modulus(i)) + static_cast<long double>(digits[i]);
  }
  return upper_half ? -value : value;
}

}  // namespace hefl::ckks

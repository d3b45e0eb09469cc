// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/encoder.hpp"

#include <cmath>
#include <string>

#include "hefl/ckks/error.hpp"

namespace hefl::ckks {

namespace {

using cd = std::complex<double>;

void bit_reverse_permute(std::vector<cd>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
}

}  // namespace

void embed_forward(const CkksContext& ctx, std::vector<cd>& vals) {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx.ring_dim();
  auto roots = ctx.root_powers();
  auto rot = ctx.rotation_group();
  bit_reverse_permute(vals);
  for (std::size_t len = 2; len <= size; len <<= 1) {
    const std::size_t lenh = len >> 1;
    const std::size_t lenq = len << 2;
    const std::size_t gap = m / lenq;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        const std::size_t idx = (rot[j] % lenq) * gap;
        const cd u = vals[i + j];
        const cd v = vals[i + j + lenh] * roots[idx];
        vals[i + j] = u + v;
        vals[i + j + lenh] = u - v;
      }
    }
  }
}

void embed_inverse(const CkksContext& ctx, std::vector<cd>& vals) {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx.ring_dim();
  auto roots = ctx.root_powers();
  auto rot = ctx.rotation_group();
  for (std::size_t len = size; len >= 2; len >>= 1) {
    const std::size_t lenh = len >> 1;
    const std::size_t lenq = len << 2;
    const std::size_t gap = m / lenq;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        const std::size_t idx = (lenq - (rot[j] % lenq)) * gap;
        const cd u = vals[i + j] + vals[i + j + lenh];
        const cd v = (vals[i + j] - vals[i + j + lenh]) * roots[idx];
        vals[i + j] = u;
        vals[i + j + lenh] = v;
      }
    }
  }
  bit_reverse_permute(vals);
  const double inv = 1.0 / static_cast<double>(size);
  for (auto& v : vals) v *= inv;
}

Plaintext encode(const CkksContext& ctx, std::span<const double> values, double scale,
                 std::optional<std::size_t> level) {
  const std::size_t slots = ctx.slot_count();
  const std::size_t n = ctx.ring_dim();
  if (values.size() > slots) {
    throw CkksError(CkksErrc::usage, std::to_string(values.size()) + " values exceed " +
                                         std::to_string(slots) + " slots");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw CkksError(CkksErrc::usage, "scale must be positive");
  const std::size_t lvl = level.value_or(ctx.data_level());
  if (lvl > ctx.key_level()) throw CkksError(CkksErrc::usage, "level above the modulus chain");

  std::vector<cd> u(slots, cd{0.0, 0.0});
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw CkksError(CkksErrc::range, "non-finite value in slot " + std::to_string(i));
    u[i] = values[i];
  }
  embed_inverse(ctx, u);

  const double headroom = static_cast<double>(ctx.modulus(0) / 2);
  std::vector<std::int64_t> coeffs(n);
  for (std::size_t i = 0; i < slots; ++i) {
    const double re = std::nearbyint(u[i].real() * scale);
    const double im = std::nearbyint(u[i].imag() * scale);
    if (!(std::fabs(re) < headroom) || !(std::fabs(im) < headroom)) {
      throw CkksError(CkksErrc::range, "encoded value exceeds the base-prime headroom");
    }
    coeffs[i] = static_cast<std::int64_t>(re);
    coeffs[i + slots] = static_cast<std::int64_t>(im);
  }
  return Plaintext{lift_signed(ctx, coeffs, lvl), scale};
}

Plaintext encode(const CkksContext& ctx, std::span<const double> values) {
  return encode(ctx, values, ctx.scale());
}

std::vector<double> decode(const CkksContext& ctx, const Plaintext& pt) {
  if (!(pt.scale > 0.0)) throw CkksError(CkksErrc::usage, "plaintext scale must be positive");
  if (pt.poly.ring_dim() != ctx.ring_dim()) throw CkksError(CkksErrc::usage, "ring dimension mismatch");
  const std::size_t slots = ctx.slot_count();
  const long double inv_scale = 1.0L / static_cast<long double>(pt.scale);
  std::vector<cd> u(slots);
  for (std::size_t i = 0; i < slots; ++i) {
    const long double re = centered_coefficient(ctx, pt.poly, i) * inv_scale;
    const long double im = centered_coefficient(ctx, pt.poly, i + slots) * inv_scale;
    u[i] = {static_cast<double>(re), static_cast<double>(im)};
  }
  embed_forward(ctx, u);
  std::vector<double> out(slots);
  for (std::size_t i = 0; i < slots; ++i) out[i] = u[i].real();
  return out;
}

double encoding_error_bound(std::size_t ring_dim, double scale, double max_abs) {
  const double n = static_cast<double>(ring_dim);
  return n / (2.0 * scale) + 64.0 * n * std::max(1.0, max_abs) * 0x1.0p-52;
}

}  // namespace hefl::ckks

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "hefl/ckks/ckks.hpp"
#include "hefl/cli/cli.hpp"
#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"

namespace hefl::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BenchRow> bench(const std::string& ckks_profile, std::span<const std::size_t> sizes, std::size_t reps,
                            std::uint64_t seed) {
  if (sizes.empty()) throw UsageError("bench needs at least one vector size");
  if (reps == 0) throw UsageError("bench needs at least one repetition");
  for (std::size_t s : sizes) {
    if (s == 0) throw UsageError("bench vector sizes must be positive");
  }
  const auto ctx = ckks::CkksContext::create(ckks::CkksParams::from_profile(ckks_profile));
  const auto keys = ckks::keygen(*ctx, derive_seed(seed, "keygen"));
  const std::size_t slots = ctx->params().slot_count();

  std::vector<BenchRow> rows;
  for (std::size_t size : sizes) {
    const std::size_t chunks = (size + slots - 1) / slots;
    Rng gen(derive_seed(seed, "bench", {size}));
    std::vector<std::vector<double>> data(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t len = std::min(slots, size - c * slots);
      data[c].resize(len);
      for (double& x : data[c]) x = gen.uniform(-1.0, 1.0);
    }
    std::vector<double> t_encode, t_encrypt, t_add, t_mul, t_decrypt;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      std::vector<ckks::Plaintext> pts;
      auto t0 = Clock::now();
      for (const auto& d : data) pts.push_back(ckks::encode(*ctx, d));
      t_encode.push_back(elapsed_ms(t0));

      std::vector<ckks::Ciphertext> cts;
      t0 = Clock::now();
      for (std::size_t c = 0; c < chunks; ++c) {
        cts.push_back(ckks::encrypt(*ctx, pts[c], keys.public_key, derive_seed(seed, "bench-enc", {size, rep, c})));
      }
      t_encrypt.push_back(elapsed_ms(t0));

      std::vector<ckks::Ciphertext> sums;
      t0 = Clock::now();
      for (const auto& ct : cts) sums.push_back(ckks::he_add(*ctx, ct, ct));
      t_add.push_back(elapsed_ms(t0));

      std::vector<ckks::Ciphertext> scaled;
      t0 = Clock::now();
      for (const auto& ct : sums) scaled.push_back(ckks::rescale(*ctx, ckks::he_mul_scalar(*ctx, ct, 0.5)));
      t_mul.push_back(elapsed_ms(t0));

      t0 = Clock::now();
      for (const auto& ct : scaled) (void)ckks::decode(*ctx, ckks::decrypt(*ctx, ct, keys.secret_key));
      t_decrypt.push_back(elapsed_ms(t0));
    }
    rows.push_back({size, "encode", median(t_encode), reps});
    rows.push_back({size, "encrypt", median(t_encrypt), reps});
    rows.push_back({size, "add", median(t_add), reps});
    rows.push_back({size, "mul-rescale", median(t_mul), reps});
    rows.push_back({size, "decrypt", median(t_decrypt), reps});
  }
  return rows;
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::string s = "size,operation,median_ms,reps\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.median_ms);
    s += std::to_string(r.size) + "," + r.operation + "," + buf + "," + std::to_string(r.reps) + "\n";
  }
  return s;
}

}  // namespace hefl::cli

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace hefl {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a root seed and a list of tags.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::initializer_list<std::uint64_t> tags = {});

/**
 * Deterministic random source.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. The standard distributions are not, so the transforms below are
 * done by hand to keep every transcript identical across toolchains.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, bound). `bound` must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal via Box-Muller (second variate cached).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hefl

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/context.hpp"

#include <cmath>
#include <numbers>

namespace hefl::ckks {

CkksContext::CkksContext(CkksParams params) : params_(std::move(params)) {
  params_.validate();
  fingerprint_ = params_.fingerprint();
  const std::size_t n = params_.ring_dim;
  const std::size_t k = params_.modulus_chain.size();

  ntt_.reserve(k);
  for (u64 q : params_.modulus_chain) ntt_.emplace_back(n, q);

  inv_prime_.assign(k, {});
  prefix_mod_.assign(k, {});
  prefix_inv_.assign(k, 1);
  log2_prefix_.assign(k, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const u64 qi = modulus(i);
    acc += std::log2(static_cast<double>(qi));
    log2_prefix_[i] = acc;
    for (std::size_t j = 0; j < i; ++j) inv_prime_[i].push_back(inv_mod(modulus(i) % modulus(j), modulus(j)));
    prefix_mod_[i].resize(i + 1);
    u64 prod = 1;
    for (std::size_t j = 0; j <= i; ++j) {
      prefix_mod_[i][j] = prod;
      if (j < i) prod = mul_mod(prod, modulus(j) % qi, qi);
    }
    prefix_inv_[i] = inv_mod(prefix_mod_[i][i], qi);
  }

  const std::size_t m = 2 * n;
  roots_.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const long double angle = 2.0L * std::numbers::pi_v<long double> * j / m;
    roots_[j] = {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
  }
  rot_group_.resize(n / 2);
  std::size_t g = 1;
  for (std::size_t j = 0; j < n / 2; ++j) {
    rot_group_[j] = g;
    g = (g * 5) % m;
  }
}

}  // namespace hefl::ckks

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/sensitivity/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/model/network.hpp"

namespace hefl::sensitivity {

Method parse_method(std::string_view name) {
  if (name == "magnitude") return Method::magnitude;
  if (name == "jacobian") return Method::jacobian;
  throw ConfigError("unknown sensitivity method '" + std::string(name) + "' (expected magnitude or jacobian)");
}

const char* to_string(Method m) { return m == Method::magnitude ? "magnitude" : "jacobian"; }

std::vector<bool> SelectionMask::membership() const {
  std::vector<bool> in(parameter_count, false);
  for (auto i : encrypted_indices) in[i] = true;
  return in;
}

std::uint64_t SelectionMask::fingerprint() const {
  std::uint64_t h = mix64(parameter_count ^ 0x6d61736bULL);
  for (auto i : encrypted_indices) h = mix64(h ^ (i + 0x9e3779b97f4a7c15ULL));
  return mix64(h ^ encrypted_indices.size());
}

SensitivityMap magnitude_map(std::span<const double> values) {
  SensitivityMap s;
  s.method = Method::magnitude;
  s.scores.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw NumericError("sensitivity", "non-finite value at index " + std::to_string(i));
    s.scores[i] = std::abs(values[i]);
  }
  return s;
}

SensitivityMap magnitude_map(const model::GradientVector& g) { return magnitude_map(g.values); }
SensitivityMap magnitude_map(const model::ModelState& m) { return magnitude_map(m.flat()); }

SensitivityMap jacobian_map(const model::ModelState& m, std::span<const std::vector<model::Example>> batches) {
  if (batches.empty()) throw UsageError("jacobian_map needs at least one batch");
  SensitivityMap s;
  s.method = Method::jacobian;
  s.scores.assign(m.size(), 0.0);
  for (const auto& batch : batches) {
    const auto lg = model::forward_backward(m, batch);
    for (std::size_t i = 0; i < s.scores.size(); ++i) s.scores[i] += lg.gradient.values[i] * lg.gradient.values[i];
  }
  const double inv = 1.0 / static_cast<double>(batches.size());
  for (auto& v : s.scores) {
    v *= inv;
    if (!std::isfinite(v)) throw NumericError("sensitivity", "non-finite jacobian score");
  }
  return s;
}

std::size_t selection_count(double r, std::size_t n) {
  const double k = std::floor(r * static_cast<double>(n) + 0.5);
  if (k <= 0.0) return 0;
  if (k >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

SelectionMask select_top_r(const SensitivityMap& s, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw UsageError("encryption ratio must lie in [0, 1], got " + std::to_string(r));
  const std::size_t n = s.scores.size();
  const std::size_t k = selection_count(r, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b] || (s.scores[a] == s.scores[b] && a < b);
  };
  if (k < n) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return SelectionMask{std::move(order), n, r};
}

std::string mask_to_json(const SelectionMask& mask) {
  nlohmann::json j;
  j["ratio"] = mask.ratio;
  j["parameter_count"] = mask.parameter_count;
  j["encrypted_indices"] = mask.encrypted_indices;
  return j.dump();
}

SelectionMask mask_from_json(std::string_view text) {
  SelectionMask m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.ratio = j.at("ratio").get<double>();
    m.parameter_count = j.at("parameter_count").get<std::size_t>();
    m.encrypted_indices = j.at("encrypted_indices").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mask json: ") + e.what());
  }
  for (std::size_t i = 0; i < m.encrypted_indices.size(); ++i) {
    if (m.encrypted_indices[i] >= m.parameter_count || (i > 0 && m.encrypted_indices[i] <= m.encrypted_indices[i - 1])) {
      throw ConfigError("mask json: indices must be strictly increasing and below parameter_count");
    }
  }
  return m;
}

}  // namespace hefl::sensitivity

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/model/network.hpp"
#include "hefl/sensitivity/sensitivity.hpp"

using namespace hefl::sensitivity;
using hefl::model::Architecture;
using hefl::model::Example;
using hefl::model::InputShape;
using hefl::model::ModelState;

namespace {

SensitivityMap map_of(std::vector<double> scores) {
  SensitivityMap s;
  s.scores = std::move(scores);
  return s;
}

// Full stable sort by descending score, take k, report ascending.
std::vector<std::size_t> brute_top(const std::vector<double>& s, std::size_t k) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

TEST_CASE("magnitude map") {
  CHECK(magnitude_map(std::vector<double>{-3, 1, 0}).scores == std::vector<double>{3, 1, 0});
  CHECK(magnitude_map(std::vector<double>{2, -2, 2}).scores == std::vector<double>{2, 2, 2});
  hefl::Rng rng(1);
  std::vector<double> v(100), neg(100);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.normal();
    neg[i] = -v[i];
  }
  CHECK(magnitude_map(v).scores == magnitude_map(neg).scores);
  CHECK_THROWS_AS(magnitude_map(std::vector<double>{1, std::nan("")}), hefl::NumericError);
}

TEST_CASE("jacobian map") {
  const auto arch = Architecture::parse("linear", InputShape{1, 1, 3}, 2);
  const std::vector<double> w = {0.5, -1.0, 0.25, 0.75, 0.1, -0.2, 0.3, -0.4};
  const ModelState m(arch, w);
  const Example ex{{1.0, -2.0, 0.5}, 1};

  SUBCASE("single linear sample matches ((yhat - y) x)^2") {
    const std::vector<std::vector<Example>> batches = {{ex}};
    const auto s = jacobian_map(m, batches);
    const std::vector<double> y = {0.0, 1.0};
    for (int o = 0; o < 2; ++o) {
      double yhat = w[6 + o];
      for (int i = 0; i < 3; ++i) yhat += w[o * 3 + i] * ex.features[i];
      for (int i = 0; i < 3; ++i) {
        const double g = (yhat - y[o]) * ex.features[i];
        CHECK(s.scores[o * 3 + i] == doctest::Approx(g * g).epsilon(1e-14));
      }
      CHECK(s.scores[6 + o] == doctest::Approx((yhat - y[o]) * (yhat - y[o])).epsilon(1e-14));
    }
  }
  SUBCASE("zero gradient gives zero scores") {
    const ModelState zero(arch, std::vector<double>(8, 0.0));
    const Example at_origin{{0.0, 0.0, 0.0}, 0};
    ModelState fit = zero;
    fit.flat()[6] = 1.0;  // bias reproduces the one-hot target exactly
    const std::vector<std::vector<Example>> batches = {{at_origin}};
    for (double s : jacobian_map(fit, batches).scores) CHECK(s == 0.0);
  }
  SUBCASE("mean over batches") {
    const Example other{{0.3, 0.1, -1.0}, 0};
    const std::vector<std::vector<Example>> same = {{ex}, {ex}};
    const std::vector<std::vector<Example>> one = {{ex}};
    CHECK(jacobian_map(m, same).scores == jacobian_map(m, one).scores);
    const std::vector<std::vector<Example>> both = {{ex, other}, {other, ex}};
    const std::vector<std::vector<Example>> b1 = {{ex, other}}, b2 = {{other, ex}};
    const auto joint = jacobian_map(m, both).scores;
    const auto s1 = jacobian_map(m, b1).scores, s2 = jacobian_map(m, b2).scores;
    for (std::size_t i = 0; i < joint.size(); ++i) CHECK(joint[i] == doctest::Approx(0.5 * (s1[i] + s2[i])));
  }
  CHECK_THROWS_AS(jacobian_map(m, std::vector<std::vector<Example>>{}), hefl::UsageError);
}

TEST_CASE("top-r selection boundaries and ties") {
  CHECK(select_top_r(map_of({3, 1, 2, 5}), 0.0).encrypted_indices.empty());
  CHECK(select_top_r(map_of({3, 1, 2, 5}), 1.0).encrypted_indices == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(select_top_r(map_of({3, 1, 2, 5}), 0.5).encrypted_indices == std::vector<std::size_t>{0, 3});
  CHECK(select_top_r(map_of({2, 2, 1}), 1.0 / 3).encrypted_indices == std::vector<std::size_t>{0});
  CHECK(select_top_r(map_of({1, 1, 1, 1}), 0.5).encrypted_indices == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(select_top_r(map_of({1}), 1.5), hefl::UsageError);
  CHECK_THROWS_AS(select_top_r(map_of({1}), -0.1), hefl::UsageError);
}

TEST_CASE("selection count rounds half up") {
  CHECK(selection_count(0.5, 5) == 3);
  CHECK(selection_count(0.25, 6) == 2);
  CHECK(selection_count(0.1, 4) == 0);
  CHECK(selection_count(0.3, 6570) == 1971);
  CHECK(selection_count(0.05, 6570) == 329);  // 328.5 rounds up
  CHECK(selection_count(1.0, 6570) == 6570);
}

TEST_CASE("top-r matches a full sort on random vectors") {
  hefl::Rng rng(7);
  const double grid[] = {0.0, 0.1, 0.25, 0.5, 0.9, 1.0};
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(1000);
    std::vector<double> s(n);
    // Coarse values force many ties.
    for (auto& v : s) v = trial % 2 ? rng.uniform01() : static_cast<double>(rng.uniform_below(8));
    for (double r : grid) {
      const auto mask = select_top_r(map_of(s), r);
      const std::size_t k = selection_count(r, n);
      CHECK(mask.encrypted_indices == brute_top(s, k));
      CHECK(mask.parameter_count == n);
      auto scaled = s;
      for (auto& v : scaled) v *= 3.7;
      CHECK(select_top_r(map_of(scaled), r).encrypted_indices == mask.encrypted_indices);
    }
  }
}

TEST_CASE("mask json roundtrip and fingerprint") {
  const auto mask = select_top_r(map_of({0.5, 4, 1, 3, 0}), 0.4);
  CHECK(mask_to_json(mask) == R"({"encrypted_indices":[1,3],"parameter_count":5,"ratio":0.4})");
  CHECK(mask_from_json(mask_to_json(mask)) == mask);
  CHECK(mask.fingerprint() == mask_from_json(mask_to_json(mask)).fingerprint());
  CHECK(mask.fingerprint() != select_top_r(map_of({0.5, 4, 1, 3, 0}), 0.6).fingerprint());
  CHECK(mask.membership() == std::vector<bool>{false, true, false, true, false});
  CHECK_THROWS_AS(mask_from_json(R"({"encrypted_indices":[3,1],"parameter_count":5,"ratio":0.4})"),
                  hefl::ConfigError);
  CHECK(parse_method("jacobian") == Method::jacobian);
  CHECK_THROWS_AS(parse_method("hessian"), hefl::ConfigError);
}

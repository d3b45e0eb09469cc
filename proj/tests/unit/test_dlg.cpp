// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <type_traits>
#include <vector>

#include "doctest.h"
#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/dlg/attack.hpp"
#include "hefl/fl/experiment.hpp"
#include "hefl/model/network.hpp"

using namespace hefl::dlg;
using hefl::fl::ClientUpdate;
using hefl::fl::PlaintextView;
using hefl::model::Architecture;
using hefl::model::ModelState;

namespace {

PlaintextView full_view(const std::vector<double>& g) {
  PlaintextView v;
  v.parameter_count = g.size();
  for (std::size_t i = 0; i < g.size(); ++i) v.entries.emplace_back(i, g[i]);
  return v;
}

std::vector<double> single_gradient(const ModelState& m, const std::vector<double>& x, int label) {
  std::vector<double> g(m.size(), 0.0);
  const auto t = hefl::model::one_hot(label, m.arch().classes);
  hefl::model::accumulate_example_gradient<double>(m, x, t, g, 1.0);
  return g;
}

template <typename View>
concept Attackable = requires(const ModelState& m, const View& v, const AttackConfig& c, std::span<const double> t) {
  dlg_reconstruct(m, v, c, std::uint64_t{1}, t);
};

hefl::fl::FlConfig desk() {
  return hefl::fl::make_config({{"profile", "desk"}, {"ckks_profile", "test-small"}});
}

}  // namespace

// The attack sees only the clear part of an update.
static_assert(Attackable<PlaintextView>);
static_assert(!Attackable<ClientUpdate>);

TEST_CASE("label inference from the final-layer sign pattern") {
  const auto m = hefl::model::build_model(Architecture::parse("mlp2", {}, 10), 3);
  hefl::Rng rng(4);
  std::vector<double> x(64);
  for (auto& v : x) v = rng.uniform01();
  for (int label : {0, 3, 9}) {
    const auto g = single_gradient(m, x, label);
    CHECK(label_infer(full_view(g), m) == label);
  }
  SUBCASE("uniform logits") {
    ModelState flat(m.arch(), std::vector<double>(m.size(), 0.0));
    const auto g = single_gradient(flat, x, 3);
    // p - onehot = 0.1 everywhere except -0.9 at the label.
    const auto& bias = flat.layout().find("fc3.bias");
    CHECK(g[bias.offset + 3] == doctest::Approx(-0.9));
    CHECK(g[bias.offset + 4] == doctest::Approx(0.1));
    CHECK(label_infer(full_view(g), flat) == 3);
  }
  SUBCASE("hidden final layer abstains") {
    const auto g = single_gradient(m, x, 3);
    PlaintextView v;
    v.parameter_count = g.size();
    const auto& w = m.layout().find("fc3.weight");
    for (std::size_t i = 0; i < w.offset; ++i) v.entries.emplace_back(i, g[i]);
    CHECK_FALSE(label_infer(v, m).has_value());
  }
  SUBCASE("squared-error models abstain") {
    const auto lin = hefl::model::build_model(Architecture::parse("linear", {}, 10), 3);
    CHECK_FALSE(label_infer(full_view(single_gradient(lin, x, 2)), lin).has_value());
  }
}

TEST_CASE("objective is exact at the true example") {
  const auto m = hefl::model::build_model(Architecture::parse("conv-s", {}, 10), 5);
  hefl::Rng rng(6);
  std::vector<double> x(64);
  for (auto& v : x) v = rng.uniform01();
  const auto g = single_gradient(m, x, 7);
  CHECK(gradient_distance(m, full_view(g), x, hefl::model::one_hot(7, 10)) < 1e-10);
  x[0] += 0.1;
  CHECK(gradient_distance(m, full_view(g), x, hefl::model::one_hot(7, 10)) > 1e-10);
}

TEST_CASE("linear model: iterative attack finds the closed-form input") {
  const auto arch = Architecture::parse("linear", {1, 2, 3}, 3);
  const auto m = hefl::model::build_model(arch, 8);
  const std::vector<double> x = {0.2, 0.9, 0.4, 0.7, 0.1, 0.5};
  const auto g = single_gradient(m, x, 1);
  // dL/dW = (yhat - y) x^T and dL/db = yhat - y, so x = row / bias for any nonzero bias entry.
  const auto& w = m.layout().find("fc.weight");
  const auto& b = m.layout().find("fc.bias");
  std::vector<double> closed(6);
  for (std::size_t i = 0; i < 6; ++i) closed[i] = g[w.offset + i] / g[b.offset];
  for (std::size_t i = 0; i < 6; ++i) CHECK(closed[i] == doctest::Approx(x[i]));

  AttackConfig cfg;
  cfg.iterations = 1500;
  cfg.restarts = 2;
  cfg.lr = 0.05;
  const auto rep = dlg_reconstruct(m, full_view(g), cfg, 9, x);
  double err = 0.0;
  for (std::size_t i = 0; i < 6; ++i) err += (rep.reconstruction[i] - closed[i]) * (rep.reconstruction[i] - closed[i]) / 6;
  CHECK(err < 1e-3);
  CHECK(rep.success);
}

TEST_CASE("mlp2 attack at r = 0 succeeds on most restarts") {
  const auto cfg = desk();
  const auto fed = hefl::fl::make_federation(cfg, 0.0);
  auto single = cfg;
  single.single_step = true;
  single.batch_size = 1;
  const auto local = hefl::fl::local_update(fed.global, fed.shards[0], single, 1, 0);
  const auto rep = dlg_reconstruct(fed.global, full_view(local.delta), AttackConfig{}, 11, local.batch[0].features);
  const double tau = 0.1 * rep.target_variance;
  int good = 0;
  for (const auto& r : rep.per_restart) good += r.input_mse < tau ? 1 : 0;
  CHECK(good >= 3);
  CHECK(rep.success);
  CHECK(rep.inferred_label == local.batch[0].label);
  CHECK(rep.psnr_db > 40.0);
  CHECK(rep.to_json()["success"] == true);
}

TEST_CASE("nothing visible leaves the random start untouched") {
  const auto m = hefl::model::build_model(Architecture::parse("mlp2", {}, 10), 12);
  PlaintextView empty;
  empty.parameter_count = m.size();
  std::vector<double> truth(64, 0.5);
  const auto rep = dlg_reconstruct(m, empty, AttackConfig{}, 13, truth);
  CHECK_FALSE(rep.success);
  CHECK(rep.input_mse == rep.init_mse);
  CHECK(rep.final_gradient_distance == 0.0);
  CHECK(rep.best_restart == 0);
  CHECK_FALSE(rep.inferred_label.has_value());
  // Same seed, same restarts.
  const auto again = dlg_reconstruct(m, empty, AttackConfig{}, 13, truth);
  CHECK(again.reconstruction == rep.reconstruction);
}

TEST_CASE("sweep table shape and endpoints") {
  AttackConfig cfg;
  cfg.restarts = 2;
  const std::vector<std::uint64_t> seeds = {1, 2};
  CHECK(attack_sweep(std::vector<double>{}, desk(), cfg, seeds).empty());
  const std::vector<double> ratios = {0.0, 1.0};
  const auto rows = attack_sweep(ratios, desk(), cfg, seeds);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[1].ratio == 1.0);
  CHECK(rows[0].reports.size() == 2);
  CHECK(rows[0].success_rate == 1.0);
  CHECK(rows[1].success_rate == 0.0);
  CHECK(rows[1].mean_visible == 0.0);
  CHECK(rows[0].mean_input_mse <= rows[1].mean_input_mse);
}

TEST_CASE("attack signal shrinks as more of the update is encrypted") {
  AttackConfig cfg;
  cfg.restarts = 2;
  const std::vector<std::uint64_t> seeds = {3, 4};
  const std::vector<double> ratios = {0.0, 0.1, 0.5, 1.0};
  const auto rows = attack_sweep(ratios, desk(), cfg, seeds);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CAPTURE(rows[i].ratio);
    CHECK(rows[i].mean_visible < rows[i - 1].mean_visible);
    CHECK(rows[i].success_rate <= rows[i - 1].success_rate);
    // Successful reconstructions sit at round-off level, so compare with slack.
    CHECK(rows[i].mean_input_mse >= rows[i - 1].mean_input_mse - 1e-9);
  }
  CHECK(rows[3].mean_input_mse > 1e3 * rows[0].mean_input_mse);
}

TEST_CASE("pgm output") {
  const auto path = std::filesystem::temp_directory_path() / "hefl_test.pgm";
  std::vector<double> px(64);
  for (std::size_t i = 0; i < 64; ++i) px[i] = static_cast<double>(i) / 63.0;
  px[0] = -1.0;
  write_pgm(path, px, {1, 8, 8});
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(bytes.substr(0, 11) == "P5\n8 8\n255\n");
  CHECK(bytes.size() == 11 + 64);
  CHECK(static_cast<unsigned char>(bytes[11]) == 0);
  CHECK(static_cast<unsigned char>(bytes.back()) == 255);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_pgm(path, px, {1, 4, 4}), hefl::UsageError);
}

TEST_CASE("attack config") {
  CHECK(AttackConfig::from_json({{"iterations", 10}, {"restarts", 2}}).iterations == 10);
  CHECK_THROWS_AS(AttackConfig::from_json({{"restarts", 0}}), hefl::ConfigError);
  CHECK_THROWS_AS(AttackConfig::from_json({{"optimizer", "lbfgs"}}), hefl::ConfigError);
}

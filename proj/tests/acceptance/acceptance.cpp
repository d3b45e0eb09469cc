// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hefl/ckks/ckks.hpp"
#include "hefl/cli/cli.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/dlg/attack.hpp"
#include "hefl/fl/experiment.hpp"
#include "hefl/metrics/metrics.hpp"
#include "hefl/model/training.hpp"
#include "hefl/sensitivity/sensitivity.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hefl;
using ckks::u64;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- AC1

Outcome ac1_ckks_correctness() {
  const auto ctx = ckks::CkksContext::create(ckks::CkksParams::from_profile("paper-128"));
  const auto keys = ckks::keygen(*ctx, 101);
  const std::size_t slots = ctx->params().slot_count();
  constexpr int kTrials = 1000;
  constexpr double kClients = 3.0;
  double add_err = 0.0, mul_err = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    Rng rng(derive_seed(7, "ac1", {static_cast<u64>(trial)}));
    std::vector<double> a(slots), b(slots);
    for (double& x : a) x = rng.uniform(-1.0, 1.0);
    for (double& x : b) x = rng.uniform(-1.0, 1.0);
    const auto ca = ckks::encrypt(*ctx, ckks::encode(*ctx, a), keys.public_key, rng.next_u64());
    const auto cb = ckks::encrypt(*ctx, ckks::encode(*ctx, b), keys.public_key, rng.next_u64());
    const auto sum = ckks::he_add(*ctx, ca, cb);
    const auto got = ckks::decode(*ctx, ckks::decrypt(*ctx, sum, keys.secret_key));
    const auto avg = ckks::decode(
        *ctx, ckks::decrypt(*ctx, ckks::rescale(*ctx, ckks::he_mul_scalar(*ctx, sum, 1.0 / kClients)), keys.secret_key));
    for (std::size_t i = 0; i < slots; ++i) {
      add_err = std::max(add_err, std::abs(got[i] - (a[i] + b[i])));
      mul_err = std::max(mul_err, std::abs(avg[i] - (a[i] + b[i]) / kClients));
    }
  }
  const bool pass = add_err <= 1e-6 && mul_err <= 1e-5;
  return {pass, "paper-128, 1000 trials x 4096 slots: add max err " + fmt("%.3g", add_err) +
                    " (<= 1e-6), x1/3+rescale max err " + fmt("%.3g", mul_err) + " (<= 1e-5)"};
}

// ---------------------------------------------------------------- AC2

// Negacyclic product with 128-bit accumulation, reduced once per coefficient.
std::vector<u64> schoolbook(const std::vector<u64>& a, const std::vector<u64>& b, u64 q) {
  const std::size_t n = a.size();
  std::vector<unsigned __int128> pos(n, 0), neg(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned __int128 ai = a[i];
    for (std::size_t j = 0; j < n - i; ++j) pos[i + j] += ai * b[j];
    for (std::size_t j = n - i; j < n; ++j) neg[i + j - n] += ai * b[j];
  }
  std::vector<u64> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const u64 p = static_cast<u64>(pos[k] % q), m = static_cast<u64>(neg[k] % q);
    out[k] = p >= m ? p - m : p + q - m;
  }
  return out;
}

std::vector<u64> ntt_product(const ckks::NttTables& t, std::vector<u64> a, std::vector<u64> b) {
  t.forward(a);
  t.forward(b);
  const u64 q = t.modulus();
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<u64>(static_cast<unsigned __int128>(a[i]) * b[i] % q);
  }
  t.inverse(a);
  return a;
}

bool is_prime(u64 q) {
  if (q < 2) return false;
  for (u64 d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

Outcome ac2_ntt_oracle() {
  std::size_t mismatches = 0, exhaustive = 0, randomized = 0;
  for (std::size_t n : {8u, 16u, 32u}) {
    for (u64 q = 2 * n + 1; q < 1000; q += 2 * n) {
      if (!is_prime(q)) continue;
      const ckks::NttTables t(n, q);
      // Bilinearity: agreement on all monomial pairs covers every input pair.
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          std::vector<u64> a(n, 0), b(n, 0);
          a[i] = 1;
          b[j] = 1;
          mismatches += ntt_product(t, a, b) != schoolbook(a, b, q);
          ++exhaustive;
        }
      }
    }
  }
  const auto params = ckks::CkksParams::from_profile("test-small");
  std::vector<ckks::NttTables> tables;
  for (u64 q : params.modulus_chain) tables.emplace_back(params.ring_dim, q);
  Rng rng(2024);
  for (int c = 0; c < 10000; ++c) {
    const auto& t = tables[static_cast<std::size_t>(c) % tables.size()];
    std::vector<u64> a(t.size()), b(t.size());
    for (auto& v : a) v = rng.uniform_below(t.modulus());
    for (auto& v : b) v = rng.uniform_below(t.modulus());
    mismatches += ntt_product(t, a, b) != schoolbook(a, b, t.modulus());
    ++randomized;
  }
  return {mismatches == 0, std::to_string(exhaustive) + " monomial pairs (N=8,16,32, all NTT primes < 1000) + " +
                               std::to_string(randomized) + " random products at N=1024: " +
                               std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------- AC3

fl::FlConfig desk_config() {
  return fl::make_config({{"profile", "desk"}, {"ckks_profile", "test-small"}, {"clients", 3}, {"rounds", 10},
                          {"seed", 11}, {"encryption_ratio", {0, 0.1, 0.5, 1}}});
}

// Plain FedAvg over the same local training runs: no masks, no encryption.
std::vector<double> fedavg_reference(const fl::FlConfig& cfg) {
  fl::Federation fed = fl::make_federation(cfg, 0.0);
  std::vector<double> w(fed.global.flat().begin(), fed.global.flat().end());
  const double eta = cfg.single_step ? cfg.optimizer.lr : cfg.server_lr;
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const model::ModelState global(fed.global.arch(), w);
    std::vector<double> sum(w.size(), 0.0);
    for (std::size_t i = 0; i < cfg.clients; ++i) {
      const auto local = fl::local_update(global, fed.shards[i], cfg, t, i);
      for (std::size_t k = 0; k < w.size(); ++k) sum[k] += std::clamp(local.delta[k], -cfg.clip, cfg.clip);
    }
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= eta * (sum[k] / static_cast<double>(cfg.clients));
  }
  return w;
}

Outcome ac3_aggregation_equivalence() {
  const auto cfg = desk_config();
  const auto reference = fedavg_reference(cfg);
  double worst = 0.0;
  double acc_train[2] = {0, 0}, acc_test[2] = {0, 0};
  std::string per_ratio;
  for (double r : cfg.encryption_ratios) {
    fl::Federation fed = fl::make_federation(cfg, r);
    fl::RoundRecord last;
    for (std::size_t t = 0; t < cfg.rounds; ++t) last = fl::run_round(fed);
    double d = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) d = std::max(d, std::abs(fed.global.flat()[k] - reference[k]));
    worst = std::max(worst, d);
    per_ratio += " r=" + fl::ratio_tag(r) + ":" + fmt("%.2g", d);
    if (r == 0.0 || r == 1.0) {
      acc_train[r == 1.0] = last.train_accuracy;
      acc_test[r == 1.0] = last.test_accuracy;
    }
  }
  const double d_train = std::abs(acc_train[0] - acc_train[1]) * 100.0;
  const double d_test = std::abs(acc_test[0] - acc_test[1]) * 100.0;
  const bool pass = worst <= 1e-4 && d_train <= 0.5 && d_test <= 0.5;
  return {pass, "10 rounds, 3 clients, test-small: max|dw| vs plaintext FedAvg" + per_ratio + " (<= 1e-4); " +
                    "r=0 vs r=1 accuracy diff train " + fmt("%.2f", d_train) + " pp, test " + fmt("%.2f", d_test) +
                    " pp (<= 0.5); test acc r=0 " + fmt("%.3f", acc_test[0])};
}

// ---------------------------------------------------------------- AC4

Outcome ac4_dlg_defense() {
  auto base = fl::make_config({{"profile", "desk"}, {"ckks_profile", "test-small"}, {"arch", "mlp2"}});
  const dlg::AttackConfig attack;
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  const std::vector<double> ratios = {0.0, 1.0};
  const auto rows = dlg::attack_sweep(ratios, base, attack, seeds);
  const auto& clear = rows[0];
  const auto& sealed = rows[1];
  const double rel = std::abs(sealed.mean_input_mse - sealed.mean_init_mse) / sealed.mean_init_mse;

  // Independent baseline: expected MSE of a U[0,1] guess against the true example.
  double analytic = 0.0;
  for (std::uint64_t s : seeds) {
    auto cfg = base;
    cfg.seed = s;
    cfg.single_step = true;
    cfg.batch_size = 1;
    const auto fed = fl::make_federation(cfg, 1.0);
    const auto truth = fl::local_update(fed.global, fed.shards[0], cfg, 1, 0).batch[0].features;
    double e = 0.0;
    for (double t : truth) e += 1.0 / 3.0 - t + t * t;
    analytic += e / static_cast<double>(truth.size()) / static_cast<double>(seeds.size());
  }
  const double rel_analytic = std::abs(sealed.mean_input_mse - analytic) / analytic;
  const bool pass = clear.success_rate >= 0.6 && sealed.success_rate == 0.0 && rel <= 0.1 && rel_analytic <= 0.1;
  return {pass, "mlp2 single-step, 5 seeds: success r=0 " + fmt("%.0f%%", clear.success_rate * 100) +
                    " (>= 60%), r=1 " + fmt("%.0f%%", sealed.success_rate * 100) + " (== 0%); r=1 mse " +
                    fmt("%.4f", sealed.mean_input_mse) + " vs init baseline " + fmt("%.4f", sealed.mean_init_mse) +
                    " (rel diff " + fmt("%.3g", rel) + " <= 0.1) and vs U[0,1] expectation " + fmt("%.4f", analytic) + " (rel diff " +
                    fmt("%.3g", rel_analytic) + " <= 0.1); r=0 mse " + fmt("%.3g", clear.mean_input_mse)};
}

// ---------------------------------------------------------------- AC5

Outcome ac5_selection_oracle() {
  const double grid[] = {0.0, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  Rng rng(55);
  std::size_t mismatches = 0, cases = 0;
  for (int v = 0; v < 1000; ++v) {
    const std::size_t n = 1 + rng.uniform_below(400);
    sensitivity::SensitivityMap s;
    s.scores.resize(n);
    // Every third vector is coarsely quantized so ties are common.
    const bool coarse = v % 3 == 0;
    for (double& x : s.scores) x = coarse ? static_cast<double>(rng.uniform_below(5)) : rng.uniform01();
    for (double r : grid) {
      const auto mask = sensitivity::select_top_r(s, r);
      const auto k = static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 0.5));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });
      idx.resize(std::min(k, n));
      std::sort(idx.begin(), idx.end());
      mismatches += mask.encrypted_indices != idx;
      ++cases;
    }
  }
  return {mismatches == 0, std::to_string(cases) + " selections over 1000 random vectors vs full stable sort: " +
                               std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------- AC6

fl::RoundRecord synthetic(double ratio, double train, double test, double loss, double ms) {
  fl::RoundRecord r;
  r.round = 1;
  r.encryption_ratio = ratio;
  r.train_accuracy = train;
  r.test_accuracy = test;
  r.avg_train_loss = loss;
  r.times.train = ms;
  return r;
}

Outcome ac6_metrics() {
  // T = 1h, 2h, 1.5h; gap = 0.1, 0.3, 0.2; loss = 1, 3, 2.
  std::vector<std::vector<fl::RoundRecord>> g = {{synthetic(0.0, 0.9, 0.8, 1.0, 3.6e6)},
                                                 {synthetic(1.0, 0.9, 0.6, 3.0, 7.2e6)},
                                                 {synthetic(0.5, 0.9, 0.7, 2.0, 5.4e6)}};
  const metrics::ExperimentSummary s[] = {metrics::summarize("hand", g)};
  const auto b = metrics::compute_bounds(s);
  int wrong = 0;
  auto expect = [&](double got, double want) { wrong += got != want; };
  expect(metrics::comp_efficiency(s[0], b, 0.0).value, 1.0);
  expect(metrics::comp_efficiency(s[0], b, 1.0).value, 0.0);
  expect(metrics::comp_efficiency(s[0], b, 0.5).value, 0.5);
  expect(metrics::loss_efficiency(s[0], b, 0.0).value, 1.0);
  expect(metrics::loss_efficiency(s[0], b, 1.0).value, 0.0);
  expect(metrics::loss_efficiency(s[0], b, 0.5).value, 0.5);
  // Gap values 0.9 - 0.8 etc. are not exact in binary; the bounds are taken
  // from the same values, so the endpoints still come out exact.
  expect(metrics::gen_efficiency(s[0], b, 0.0).value, 1.0);
  expect(metrics::gen_efficiency(s[0], b, 1.0).value, 0.0);
  wrong += std::abs(metrics::gen_efficiency(s[0], b, 0.5).value - 0.5) > 1e-12;
  expect(metrics::accuracy_metric(s[0], 1.0), 0.6);

  Rng rng(66);
  std::size_t out_of_range = 0, checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<metrics::ExperimentSummary> exps;
    const std::size_t models = 1 + rng.uniform_below(3);
    for (std::size_t m = 0; m < models; ++m) {
      std::vector<std::vector<fl::RoundRecord>> groups;
      for (double r : {0.0, 0.1, 0.5, 1.0}) {
        std::vector<fl::RoundRecord> recs;
        const std::size_t rounds = 1 + rng.uniform_below(4);
        for (std::size_t t = 0; t < rounds; ++t) {
          recs.push_back(synthetic(r, rng.uniform01(), rng.uniform01(), 5 * rng.uniform01(), 1e7 * rng.uniform01()));
        }
        groups.push_back(recs);
      }
      exps.push_back(metrics::summarize("m" + std::to_string(m), groups));
    }
    const auto bb = metrics::compute_bounds(exps);
    for (const auto& e : exps) {
      for (const auto& r : e.ratios) {
        for (const auto& m : {metrics::comp_efficiency(e, bb, r.ratio), metrics::gen_efficiency(e, bb, r.ratio),
                              metrics::loss_efficiency(e, bb, r.ratio)}) {
          out_of_range += !(m.value >= 0.0 && m.value <= 1.0) || m.degenerate;
          ++checked;
        }
      }
    }
  }
  return {wrong == 0 && out_of_range == 0, std::to_string(10 - wrong) + "/10 hand values exact; " +
                                               std::to_string(checked - out_of_range) + "/" +
                                               std::to_string(checked) + " random metrics in [0,1]"};
}

// ---------------------------------------------------------------- AC7

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string records_without_times(const fs::path& p) {
  std::string out;
  for (const auto& r : fl::read_records(p)) {
    auto j = fl::record_to_json(r);
    j.erase("times_ms");
    out += j.dump() + "\n";
  }
  return out;
}

Outcome ac7_determinism() {
  const fs::path root = fs::temp_directory_path() / "hefl_acceptance_ac7";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "config.json") << R"({"profile":"desk","ckks_profile":"test-small","seed":3,)"
                                         R"("encryption_ratio":[0,0.5,1],"rounds":4})";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + HEFL_BIN + "\" train --config \"" + (root / "config.json").string() +
                            "\" --out \"" + (root / run).string() + "\" > \"" + (root / run).string() + ".log\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "train invocation failed: " + cmd};
  }
  std::size_t files = 0, differing = 0;
  for (double r : {0.0, 0.5, 1.0}) {
    const auto ra = fl::records_path(root / "a", r), rb = fl::records_path(root / "b", r);
    const auto ca = fl::checkpoint_path(root / "a", r), cb = fl::checkpoint_path(root / "b", r);
    differing += records_without_times(ra) != records_without_times(rb);
    differing += slurp(ca).empty() || slurp(ca) != slurp(cb);
    files += 2;
  }
  return {differing == 0, "two `hefl train` runs, 3 ratios: " + std::to_string(files - differing) + "/" +
                              std::to_string(files) + " records/checkpoint files identical"};
}

// ---------------------------------------------------------------- AC8

Outcome ac8_bench() {
  const std::vector<std::size_t> sizes = {4096};
  const auto rows = cli::bench("paper-128", sizes, 7, 1);
  double add = -1, enc = -1, dec = -1;
  for (const auto& r : rows) {
    if (r.operation == "add") add = r.median_ms;
    if (r.operation == "encrypt") enc = r.median_ms;
    if (r.operation == "decrypt") dec = r.median_ms;
  }
  const bool pass = rows.size() == 5 && add >= 0 && enc >= 0 && dec >= 0 && add < enc;
  return {pass, "paper-128, 4096 slots, median of 7: encrypt " + fmt("%.3f", enc) + " ms, decrypt " +
                    fmt("%.3f", dec) + " ms, add " + fmt("%.3f", add) + " ms (add < encrypt)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"AC1", "ckks correctness", ac1_ckks_correctness},
      {"AC2", "ntt oracle equivalence", ac2_ntt_oracle},
      {"AC3", "aggregation equivalence", ac3_aggregation_equivalence},
      {"AC4", "dlg defense", ac4_dlg_defense},
      {"AC5", "selection oracle", ac5_selection_oracle},
      {"AC6", "metrics formulas", ac6_metrics},
      {"AC7", "cli determinism", ac7_determinism},
      {"AC8", "bench sanity", ac8_bench},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

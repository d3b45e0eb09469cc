// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "hefl/ckks/serialize.hpp"
#include "hefl/cli/cli.hpp"
#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/dlg/attack.hpp"
#include "hefl/fl/experiment.hpp"
#include "hefl/metrics/metrics.hpp"

namespace hefl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDefaultAttackRatios = "0,0.1,0.5,1";

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  CLI::Option* seed_opt = nullptr;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) sub->add_option("--config", c.config, "Experiment config (JSON)");
  sub->add_option("--out", c.out, "Output directory");
  c.seed_opt = sub->add_option("--seed", c.seed, "Root seed (overrides the config)");
  sub->add_option("--set", c.sets, "Config override key=value, repeatable")->type_name("KEY=VALUE");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

fs::path ensure_dir(const std::string& dir) {
  const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --set pairs first, then the dedicated flags on top.
json collect_overrides(const Common& c) {
  json o = json::object();
  for (const auto& s : c.sets) {
    auto [k, v] = fl::parse_override(s);
    o[k] = v;
  }
  if (c.seed_opt && c.seed_opt->count()) o["seed"] = c.seed;
  return o;
}

struct TrainArgs {
  Common common;
  std::string ratios;
  std::string method;
  std::string ckks_profile;
  bool resume = false;
  bool single_step = false;
};

int cmd_train(const TrainArgs& a, bool verbose, std::ostream& out, std::ostream& err) {
  json overrides = collect_overrides(a.common);
  if (!a.ratios.empty()) overrides["encryption_ratio"] = fl::parse_ratio_list(a.ratios);
  if (!a.method.empty()) overrides["sensitivity_method"] = a.method;
  if (!a.ckks_profile.empty()) overrides["ckks_profile"] = a.ckks_profile;
  if (a.single_step) overrides["single_step"] = true;
  json file = read_json(a.common.config);
  file.erase("attack");
  fl::FlConfig cfg;
  try {
    cfg = fl::make_config(file, overrides);
  } catch (Error& e) {
    e.add_context(a.common.config);
    throw;
  }
  const fs::path dir = ensure_dir(a.common.out);
  write_text(dir / "config.json", cfg.to_json().dump(2) + "\n");
  for (double r : cfg.encryption_ratios) {
    std::optional<fs::path> from;
    const fs::path ckpt = fl::checkpoint_path(dir, r);
    if (a.resume && fs::exists(ckpt)) from = ckpt;
    if (verbose) {
      err << "ratio " << fl::ratio_tag(r) << (from ? ": resuming from " + ckpt.string() : ": starting") << "\n";
    }
    const auto result = fl::run_experiment(cfg, r, dir, from);
    if (result.records.empty()) continue;
    const auto& last = result.records.back();
    out << "ratio " << fl::ratio_tag(r) << "  rounds " << last.round << "  encrypted " << last.encrypted_count
        << "/" << last.parameter_count << "  train_acc " << fixed(last.train_accuracy) << "  test_acc "
        << fixed(last.test_accuracy) << "  loss " << fixed(last.avg_train_loss) << "\n";
  }
  out << "records written to " << dir.string() << "\n";
  return 0;
}

struct KeygenArgs {
  Common common;
  std::string ckks_profile;
};

int cmd_keygen(const KeygenArgs& a, std::ostream& out) {
  std::string profile = "paper-128";
  std::uint64_t seed = 1;
  if (!a.common.config.empty()) {
    json file = read_json(a.common.config);
    file.erase("attack");
    const auto cfg = fl::make_config(file, collect_overrides(a.common));
    profile = cfg.ckks_profile;
    seed = cfg.seed;
  } else {
    if (!a.common.sets.empty()) throw UsageError("--set needs --config");
    if (a.common.seed_opt->count()) seed = a.common.seed;
  }
  if (!a.ckks_profile.empty()) profile = a.ckks_profile;
  const auto km = fl::generate_keys(profile, seed);
  const fs::path dir = ensure_dir(a.common.out);
  ckks::write_file(dir / "public.key", ckks::serialize_public_key(*km.ctx, km.keys.public_key));
  ckks::write_file(dir / "secret.key", ckks::serialize_secret_key(*km.ctx, km.keys.secret_key));
  const auto& p = km.ctx->params();
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(p.fingerprint()));
  out << "profile " << profile << "\nring_dim " << p.ring_dim << "\nprimes " << p.level_count() << "\nfingerprint "
      << fp << "\nwrote " << (dir / "public.key").string() << " and " << (dir / "secret.key").string() << "\n";
  return 0;
}

struct AttackArgs {
  Common common;
  std::string update;
  std::string ratios;
  std::size_t seeds = 5;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> restarts;
};

dlg::AttackConfig attack_settings(const AttackArgs& a, const json& file) {
  auto cfg = dlg::AttackConfig::from_json(file.value("attack", json::object()));
  if (a.iterations) cfg.iterations = *a.iterations;
  if (a.restarts) cfg.restarts = *a.restarts;
  cfg.validate();
  return cfg;
}

std::string report_line(const dlg::ReconstructionReport& r) {
  return "visible " + std::to_string(r.visible_count) + "  gradient_distance " + fixed(r.final_gradient_distance, 6) +
         "  input_mse " + fixed(r.input_mse, 6) + "  init_mse " + fixed(r.init_mse, 6) +
         (r.success ? "  success" : "  failed");
}

int cmd_attack(const AttackArgs& a, bool verbose, std::ostream& out, std::ostream& err) {
  const json file = a.common.config.empty() ? json::object() : read_json(a.common.config);
  const auto attack = attack_settings(a, file);
  const fs::path dir = ensure_dir(a.common.out);

  if (!a.update.empty()) {
    if (!a.ratios.empty()) throw UsageError("--encryption-ratio does not apply to a captured update");
    const auto c = fl::read_capture(a.update);
    const model::ModelState m(c.arch, c.global_weights);
    std::vector<double> truth;
    if (c.target) truth = c.target->features;
    const std::uint64_t seed = a.common.seed_opt->count() ? a.common.seed : 1;
    const auto report = dlg::dlg_reconstruct(m, c.plaintext, attack, derive_seed(seed, "attack"), truth);
    json j = {{"source", a.update},
              {"round", c.round},
              {"client_id", c.client_id},
              {"encryption_ratio", c.encryption_ratio},
              {"encrypted_count", c.encrypted_count},
              {"attack", attack.to_json()},
              {"report", report.to_json()}};
    write_text(dir / "report.json", j.dump(2) + "\n");
    dlg::write_pgm(dir / "reconstruction.pgm", report.reconstruction, c.arch.input);
    if (c.target) dlg::write_pgm(dir / "target.pgm", c.target->features, c.arch.input);
    out << report_line(report) << "\n";
    return 0;
  }

  if (a.common.config.empty()) throw UsageError("attack needs --config or --update");
  json base = file;
  base.erase("attack");
  fl::FlConfig cfg;
  try {
    cfg = fl::make_config(base, collect_overrides(a.common));
  } catch (Error& e) {
    e.add_context(a.common.config);
    throw;
  }
  const auto ratios = fl::parse_ratio_list(a.ratios.empty() ? kDefaultAttackRatios : a.ratios);
  if (a.seeds == 0) throw UsageError("--seeds must be positive");
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.seeds; ++i) seeds.push_back(cfg.seed + i);
  if (verbose) err << "attacking " << ratios.size() << " ratios x " << seeds.size() << " seeds\n";

  const auto rows = dlg::attack_sweep(ratios, cfg, attack, seeds);
  json j = {{"attack", attack.to_json()}, {"config", cfg.to_json()}, {"seeds", seeds}, {"rows", json::array()}};
  out << "ratio,mean_visible,mean_gradient_distance,mean_input_mse,mean_init_mse,success_rate\n";
  for (const auto& row : rows) {
    json rj = {{"ratio", row.ratio},
               {"mean_visible", row.mean_visible},
               {"mean_gradient_distance", row.mean_gradient_distance},
               {"mean_input_mse", row.mean_input_mse},
               {"mean_init_mse", row.mean_init_mse},
               {"success_rate", row.success_rate},
               {"reports", json::array()}};
    for (std::size_t k = 0; k < row.reports.size(); ++k) {
      rj["reports"].push_back(row.reports[k].to_json());
    }
    j["rows"].push_back(rj);
    out << fl::ratio_tag(row.ratio) << "," << fixed(row.mean_visible, 1) << "," << fixed(row.mean_gradient_distance, 6)
        << "," << fixed(row.mean_input_mse, 6) << "," << fixed(row.mean_init_mse, 6) << ","
        << fixed(row.success_rate, 2) << "\n";
  }
  write_text(dir / "report.json", j.dump(2) + "\n");
  return 0;
}

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<metrics::ExperimentSummary> exps;
  for (const auto& r : a.runs) exps.push_back(metrics::load_experiment(r));
  const fs::path dir = a.out.empty() ? fs::path(a.runs.front()) : fs::path(a.out);
  metrics::emit_reports(dir, exps);
  std::ifstream radar(dir / "radar.csv", std::ios::binary);
  out << std::string(std::istreambuf_iterator<char>(radar), std::istreambuf_iterator<char>());
  return 0;
}

struct BenchArgs {
  std::string ckks_profile = "paper-128";
  std::string sizes = "4096";
  std::size_t reps = 5;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(a.sizes);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v <= 0) throw std::invalid_argument(item);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw UsageError("bad vector size '" + item + "'");
    }
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  const auto rows = bench(a.ckks_profile, sizes, a.reps, a.seed);
  const std::string csv = bench_csv(rows);
  if (!a.out.empty()) write_text(ensure_dir(a.out) / "bench.csv", csv);
  out << csv;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated learning with selective homomorphic encryption of model updates.", "hefl"};
  app.require_subcommand(1);
  app.fallthrough(false);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");

  KeygenArgs keygen;
  auto* k = app.add_subcommand("keygen", "Generate a CKKS key pair and print the parameter fingerprint");
  add_common(k, keygen.common);
  k->add_option("--ckks-profile", keygen.ckks_profile, "paper-128 (default) or test-small");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Run federated training for each configured encryption ratio");
  add_common(t, train.common);
  t->get_option("--config")->required();
  t->get_option("--out")->required();
  t->add_option("--encryption-ratio", train.ratios, "Ratio or comma list, e.g. 0,0.1,0.5,1");
  t->add_option("--sensitivity-method", train.method, "magnitude or jacobian");
  t->add_option("--ckks-profile", train.ckks_profile, "paper-128 or test-small");
  t->add_flag("--resume", train.resume, "Continue from checkpoints found in the output directory");
  t->add_flag("--single-step", train.single_step, "One local step per round, raw gradient upload");

  AttackArgs attack;
  auto* at = app.add_subcommand("attack", "Gradient-inversion attack on captured or simulated updates");
  add_common(at, attack.common);
  at->add_option("--update", attack.update, "Captured update file to attack");
  at->add_option("--encryption-ratio", attack.ratios, std::string("Sweep ratios (default ") + kDefaultAttackRatios + ")");
  at->add_option("--seeds", attack.seeds, "Number of seeds in the sweep, starting at the config seed")
      ->capture_default_str();
  at->add_option("--iterations", attack.iterations, "Optimizer iterations per restart");
  at->add_option("--restarts", attack.restarts, "Random restarts");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Compute evaluation metrics from training records");
  r->add_option("runs", report.runs, "Training output directories")->required();
  r->add_option("--out", report.out, "Report directory (default: the first run directory)");

  BenchArgs bench_args;
  auto* b = app.add_subcommand("bench", "Time CKKS operations");
  b->add_option("--ckks-profile", bench_args.ckks_profile, "CKKS profile")->capture_default_str();
  b->add_option("--sizes", bench_args.sizes, "Comma list of vector sizes")->capture_default_str();
  b->add_option("--reps", bench_args.reps, "Repetitions per operation")->capture_default_str();
  b->add_option("--seed", bench_args.seed, "Key and data seed")->capture_default_str();
  b->add_option("--out", bench_args.out, "Also write bench.csv here");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::usage);
  }

  try {
    if (k->parsed()) return cmd_keygen(keygen, out);
    if (t->parsed()) return cmd_train(train, verbose, out, err);
    if (at->parsed()) return cmd_attack(attack, verbose, out, err);
    if (r->parsed()) return cmd_report(report, out);
    if (b->parsed()) return cmd_bench(bench_args, out);
  } catch (const Error& e) {
    err << to_string(e.category()) << " error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return static_cast<int>(ErrorCategory::usage);
}

}  // namespace hefl::cli

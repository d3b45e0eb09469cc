// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "hefl/common/error.hpp"
#include "hefl/metrics/metrics.hpp"

namespace hefl::metrics {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  return line + "\r\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

json stage_json(const fl::StageTimes& t) {
  return {{"train", t.train},
          {"encrypt", t.encrypt},
          {"aggregate_he", t.aggregate_he},
          {"aggregate_plain", t.aggregate_plain},
          {"decrypt", t.decrypt}};
}

}  // namespace

ExperimentSummary load_experiment(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::string profile = dir.filename().string();
  if (profile.empty()) profile = dir.parent_path().filename().string();
  const fs::path cfg = dir / "config.json";
  if (fs::exists(cfg)) {
    std::ifstream in(cfg);
    try {
      const json j = json::parse(in);
      profile = j.value("arch", profile);
    } catch (const json::exception& e) {
      throw ConfigError(cfg.string() + ": " + e.what());
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("records_r", 0) == 0 && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no records_r*.jsonl files in " + dir.string());
  std::vector<std::vector<fl::RoundRecord>> groups;
  for (const auto& f : files) groups.push_back(fl::read_records(f));
  try {
    return summarize(profile, groups);
  } catch (Error& e) {
    e.add_context(dir.string());
    throw;
  }
}

void emit_reports(const fs::path& out_dir, std::span<const ExperimentSummary> experiments) {
  if (experiments.empty()) throw ConfigError("no completed experiments to report");
  for (const auto& e : experiments) {
    if (e.ratios.empty() || e.records.size() != e.ratios.size()) {
      throw ConfigError("experiment '" + e.profile + "' has no completed rounds");
    }
    for (const auto& g : e.records) {
      if (g.empty()) throw ConfigError("experiment '" + e.profile + "' has an empty record set");
    }
  }
  const NormalizationBounds b = compute_bounds(experiments);

  json summary;
  summary["bounds"] = {{"t_min_hours", b.t_min},   {"t_max_hours", b.t_max}, {"gap_min", b.gap_min},
                       {"gap_max", b.gap_max},     {"loss_min", b.loss_min}, {"loss_max", b.loss_max}};
  summary["experiments"] = json::array();

  std::string rounds = join_row({"profile", "round", "ratio", "train_acc", "test_acc", "loss", "train_ms", "encrypt_ms",
                                 "aggregate_he_ms", "aggregate_plain_ms", "decrypt_ms"});
  std::string radar = join_row({"profile", "ratio", "accuracy", "e_comp", "e_gen", "e_loss"});
  std::string gap = join_row({"profile", "ratio", "train_acc", "test_acc", "gap"});

  for (const auto& e : experiments) {
    json ej = {{"profile", e.profile}, {"ratios", json::array()}};
    for (std::size_t k = 0; k < e.ratios.size(); ++k) {
      const RatioSummary& r = e.ratios[k];
      const Metric comp = comp_efficiency(e, b, r.ratio);
      const Metric gen = gen_efficiency(e, b, r.ratio);
      const Metric loss = loss_efficiency(e, b, r.ratio);
      json warnings = json::array();
      if (comp.degenerate) warnings.push_back("e_comp: degenerate time bounds, reported as 1");
      if (gen.degenerate) warnings.push_back("e_gen: degenerate gap bounds, reported as 1");
      if (loss.degenerate) warnings.push_back("e_loss: degenerate loss bounds, reported as 1");
      ej["ratios"].push_back({{"ratio", r.ratio},
                              {"rounds", r.rounds},
                              {"train_acc", r.train_acc},
                              {"test_acc", r.test_acc},
                              {"generalization_gap", r.generalization_gap()},
                              {"avg_loss", r.avg_loss},
                              {"total_train_hours", r.total_train_hours},
                              {"stage_ms", stage_json(r.stage_ms)},
                              {"metrics",
                               {{"accuracy", accuracy_metric(e, r.ratio)},
                                {"e_comp", comp.value},
                                {"e_gen", gen.value},
                                {"e_loss", loss.value}}},
                              {"warnings", warnings}});
      radar += join_row({e.profile, csv_number(r.ratio), csv_number(accuracy_metric(e, r.ratio)),
                         csv_number(comp.value), csv_number(gen.value), csv_number(loss.value)});
      gap += join_row({e.profile, csv_number(r.ratio), csv_number(r.train_acc), csv_number(r.test_acc),
                       csv_number(r.generalization_gap())});
      for (const auto& x : e.records[k]) {
        rounds += join_row({e.profile, std::to_string(x.round), csv_number(x.encryption_ratio),
                            csv_number(x.train_accuracy), csv_number(x.test_accuracy), csv_number(x.avg_train_loss),
                            csv_number(x.times.train), csv_number(x.times.encrypt), csv_number(x.times.aggregate_he),
                            csv_number(x.times.aggregate_plain), csv_number(x.times.decrypt)});
      }
    }
    summary["experiments"].push_back(ej);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  write_text(out_dir / "rounds.csv", rounds);
  write_text(out_dir / "radar.csv", radar);
  write_text(out_dir / "gap.csv", gap);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_csv(text);
}

}  // namespace hefl::metrics

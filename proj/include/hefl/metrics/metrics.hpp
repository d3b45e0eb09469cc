// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hefl/fl/experiment.hpp"

namespace hefl::metrics {

struct RatioSummary {
  double ratio = 0.0;
  std::size_t rounds = 0;
  double train_acc = 0.0;  // final round
  double test_acc = 0.0;   // final round
  double avg_loss = 0.0;   // mean of per-round average training loss
  double total_train_hours = 0.0;  // all stages, all rounds
  fl::StageTimes stage_ms;         // per-stage totals over rounds

  double generalization_gap() const { return train_acc - test_acc; }
};

/// One model/scenario: results per encryption ratio, ascending by ratio.
struct ExperimentSummary {
  std::string profile;
  std::vector<RatioSummary> ratios;
  std::vector<std::vector<fl::RoundRecord>> records;  // aligned with `ratios`

  /// Throws ConfigError when the ratio is absent.
  const RatioSummary& at(double ratio) const;
};

/// Groups records by ratio. Throws ConfigError on an empty set or an empty ratio group.
ExperimentSummary summarize(const std::string& profile, std::span<const std::vector<fl::RoundRecord>> per_ratio);

struct NormalizationBounds {
  double t_min = 0.0, t_max = 0.0;
  double gap_min = 0.0, gap_max = 0.0;
  double loss_min = 0.0, loss_max = 0.0;
};

/// Min/max of training hours, generalization gap and loss over every ratio of every experiment.
NormalizationBounds compute_bounds(std::span<const ExperimentSummary> experiments);

/// A metric value; `degenerate` is set when min == max and the value defaulted to 1.
struct Metric {
  double value = 0.0;
  bool degenerate = false;
};

double accuracy_metric(const ExperimentSummary& s, double ratio);
/// 1 - (T_r - T_min) / (T_max - T_min)
Metric comp_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio);
/// 1 - (gap_r - gap_min) / (gap_max - gap_min), gap = train accuracy - test accuracy
Metric gen_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio);
/// 1 - (Loss_r - L_min) / (L_max - L_min)
Metric loss_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio);

/// 1 - (v - lo) / (hi - lo), or 1 with the degenerate flag when hi == lo.
Metric normalized_inverse(double v, double lo, double hi);

/// Reads config.json (for the profile label) and every records_r*.jsonl in `dir`.
ExperimentSummary load_experiment(const std::filesystem::path& dir);

/**
 * Writes summary.json, rounds.csv, radar.csv and gap.csv into `out_dir`.
 * Inputs are checked before anything is written. Output contains no
 * timestamps, so equal inputs give byte-identical files.
 */
void emit_reports(const std::filesystem::path& out_dir, std::span<const ExperimentSummary> experiments);

/// RFC 4180 helpers.
std::string csv_escape(const std::string& field);
std::string csv_number(double v);  // fixed, 6 decimals
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace hefl::metrics

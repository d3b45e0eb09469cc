// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hefl/fl/config.hpp"
#include "hefl/fl/protocol.hpp"
#include "hefl/model/architecture.hpp"

namespace hefl::dlg {

struct AttackConfig {
  std::size_t iterations = 300;
  std::size_t restarts = 5;
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Success when input_mse < success_factor * variance(target).
  double success_factor = 0.1;
  std::size_t threads = 0;

  void validate() const;
  static AttackConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RestartResult {
  std::size_t index = 0;
  double gradient_distance = 0.0;
  double input_mse = 0.0;
  double init_mse = 0.0;
  bool diverged = false;
  std::size_t iterations_run = 0;
  std::vector<double> reconstruction;
};

struct ReconstructionReport {
  std::size_t visible_count = 0;
  std::optional<int> inferred_label;
  std::size_t best_restart = 0;
  double final_gradient_distance = 0.0;
  double input_mse = 0.0;
  double init_mse = 0.0;  // the selected restart's starting point against the target
  double psnr_db = 0.0;   // +inf when input_mse == 0
  double target_variance = 0.0;
  bool success = false;
  std::vector<double> reconstruction;
  std::vector<RestartResult> per_restart;

  nlohmann::json to_json() const;
};

/**
 * Label from the final-layer gradient of a single-example cross-entropy
 * update: the one class whose visible weight-and-bias row has a negative
 * mean. Abstains when no final-layer entry is visible, when the sign pattern
 * is not unique, or when the model is not trained with cross-entropy.
 */
std::optional<int> label_infer(const fl::PlaintextView& observed, const model::ModelState& m);

/// D(x, y) = sum over visible i of (grad_i(x, y) - observed_i)^2.
double gradient_distance(const model::ModelState& m, const fl::PlaintextView& observed, std::span<const double> x,
                         std::span<const double> target);

/**
 * Gradient-matching reconstruction of a single example from the clear part
 * of an update. `truth` is used only to score the result. Each restart
 * starts from x ~ U[0, 1] and runs Adam on x, and on a dummy label as well
 * when label_infer abstains. Restarts that hit a non-finite objective stop
 * and are marked diverged. The reported restart has the smallest final
 * distance, ties going to the lower index.
 */
ReconstructionReport dlg_reconstruct(const model::ModelState& m, const fl::PlaintextView& observed,
                                     const AttackConfig& cfg, std::uint64_t seed, std::span<const double> truth);

struct SweepRow {
  double ratio = 0.0;
  double mean_input_mse = 0.0;
  double mean_init_mse = 0.0;
  double mean_gradient_distance = 0.0;
  double mean_visible = 0.0;
  double success_rate = 0.0;
  std::vector<ReconstructionReport> reports;  // one per seed
};

/**
 * For every ratio and seed: builds the single-step, batch-1 federation for
 * that seed, runs client 0's round-1 update through the real protocol and
 * attacks its clear part. Empty `ratios` give an empty table.
 */
std::vector<SweepRow> attack_sweep(std::span<const double> ratios, const fl::FlConfig& base,
                                   const AttackConfig& attack, std::span<const std::uint64_t> seeds);

/// Binary PGM (P5), values clamped to [0, 1]. Multi-channel input is averaged per pixel.
void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, const model::InputShape& shape);

}  // namespace hefl::dlg

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hefl/model/optimizer.hpp"
#include "hefl/sensitivity/sensitivity.hpp"

namespace hefl::fl {

/**
 * Experiment configuration.
 *
 * Defaults come from the run profile: "paper" (3 clients, 50 rounds, batch
 * 16, 10 local epochs, lr 0.01) or "desk" (10 rounds, batch 8, 2 local
 * epochs, lr 0.1). A config file and then command-line overrides are
 * layered on top.
 */
struct FlConfig {
  std::string profile = "paper";
  std::size_t clients = 3;
  std::size_t rounds = 50;
  std::vector<double> encryption_ratios = {0.5};
  sensitivity::Method sensitivity_method = sensitivity::Method::magnitude;
  std::size_t local_epochs = 10;
  std::size_t batch_size = 16;
  std::string ckks_profile = "paper-128";
  std::uint64_t seed = 1;
  std::string dataset = "toy-vision";  // or "cifar10:<directory>"
  std::string arch = "mlp2";
  model::OptimizerConfig optimizer;
  double server_lr = 1.0;
  double clip = 8.0;
  std::size_t checkpoint_every = 1;
  bool single_step = false;
  std::size_t train_size = 600;
  std::size_t test_size = 200;
  std::size_t calibration_batches = 4;
  std::size_t threads = 0;  // 0 = HEFL_THREADS or hardware concurrency
  std::size_t capture_round = 0;  // 0 = no capture
  std::size_t capture_client = 0;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  nlohmann::json to_json() const;
  /// The single ratio of a non-sweep config. Throws ConfigError for sweeps.
  double ratio() const;
  /// Hash of every field that affects the training transcript.
  std::uint64_t transcript_fingerprint() const;
};

FlConfig profile_defaults(const std::string& profile);

/// Layers `overrides` (later wins) over `file` over the profile defaults.
FlConfig make_config(const nlohmann::json& file, const nlohmann::json& overrides = nlohmann::json::object());
FlConfig load_config(const std::filesystem::path& path, const nlohmann::json& overrides = nlohmann::json::object());

/// Parses a "key=value" override. Numbers, booleans and JSON arrays are
/// recognised; anything else is kept as a string.
std::pair<std::string, nlohmann::json> parse_override(const std::string& text);

/// Accepts "0.5" or a comma list such as "0,0.1,0.5,1".
std::vector<double> parse_ratio_list(const std::string& text);

}  // namespace hefl::fl

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hefl/fl/config.hpp"
#include "hefl/fl/protocol.hpp"

namespace hefl::fl {

/// Stage wall times in milliseconds, summed over clients where a stage runs per client.
struct StageTimes {
  double train = 0.0;
  double encrypt = 0.0;
  double aggregate_he = 0.0;
  double aggregate_plain = 0.0;
  double decrypt = 0.0;

  double total() const { return train + encrypt + aggregate_he + aggregate_plain + decrypt; }
};

struct RoundRecord {
  std::size_t round = 0;
  double encryption_ratio = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double avg_train_loss = 0.0;
  double test_loss = 0.0;
  std::size_t encrypted_count = 0;
  std::size_t parameter_count = 0;
  std::uint64_t mask_fingerprint = 0;
  StageTimes times;
};

nlohmann::json record_to_json(const RoundRecord& r);
RoundRecord record_from_json(const nlohmann::json& j);
/// One record per line. Throws ParseError on a malformed line.
std::vector<RoundRecord> read_records(const std::filesystem::path& path);

/// Server and simulated clients for one encryption ratio.
struct Federation {
  FlConfig config;
  double ratio = 0.0;
  model::Dataset train;
  model::Dataset test;
  std::vector<model::Dataset> shards;
  KeyMaterial keys;
  model::ModelState global;
  /// Aggregated update of the last completed round; empty before round 1.
  std::vector<double> last_aggregate;
  std::size_t completed_rounds = 0;
  /// Where captured client updates are written; empty disables capture.
  std::filesystem::path capture_dir;
};

/// Loads or generates the data, partitions it, generates keys and the initial model.
Federation make_federation(const FlConfig& cfg, double ratio);

/**
 * The mask every client uses in `round`: the top-r coordinates by
 * |last aggregate| (round 1: |global weights|) for the magnitude method, or
 * by the mean squared gradient of the global model on the first test batches
 * for the jacobian method.
 */
sensitivity::SelectionMask round_mask(const Federation& fed, std::size_t round);

/// Runs round completed_rounds + 1 and returns its record.
RoundRecord run_round(Federation& fed);

std::string ratio_tag(double ratio);  // "0.50"
std::filesystem::path records_path(const std::filesystem::path& out_dir, double ratio);
std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, double ratio);

struct ExperimentResult {
  double ratio = 0.0;
  std::vector<RoundRecord> records;
  model::ModelState final_model;
};

/**
 * Runs all configured rounds at one ratio, appending records to
 * records_r<ratio>.jsonl and writing checkpoint_r<ratio>.ckpt every
 * checkpoint_every rounds and after the last one. With `resume`, training
 * restarts after the checkpointed round; records past it are discarded.
 */
ExperimentResult run_experiment(const FlConfig& cfg, double ratio, const std::filesystem::path& out_dir,
                                const std::optional<std::filesystem::path>& resume = std::nullopt);

/// run_experiment for every configured ratio, plus config.json in `out_dir`.
std::vector<ExperimentResult> run_sweep(const FlConfig& cfg, const std::filesystem::path& out_dir);

/// Captured update on disk: what an eavesdropper on the client link sees, plus
/// the broadcast model and (single-step, batch 1) the true example for scoring.
struct CapturedUpdate {
  std::size_t round = 0;
  std::size_t client_id = 0;
  double encryption_ratio = 0.0;
  model::Architecture arch;
  std::vector<double> global_weights;
  PlaintextView plaintext;
  std::size_t encrypted_count = 0;
  std::size_t encrypted_chunks = 0;
  std::optional<model::Example> target;
};

void write_capture(const std::filesystem::path& path, const CapturedUpdate& c);
CapturedUpdate read_capture(const std::filesystem::path& path);

}  // namespace hefl::fl

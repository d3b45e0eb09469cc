// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hefl/ckks/ckks.hpp"
#include "hefl/fl/config.hpp"
#include "hefl/model/architecture.hpp"
#include "hefl/model/dataset.hpp"
#include "hefl/sensitivity/sensitivity.hpp"

namespace hefl::fl {

/// One keypair from the key authority: clients get the public key, the server the secret key.
struct KeyMaterial {
  std::shared_ptr<const ckks::CkksContext> ctx;
  ckks::KeyPair keys;
};

KeyMaterial generate_keys(const std::string& ckks_profile, std::uint64_t seed);

/// The unencrypted coordinates of an update, ascending by index.
struct PlaintextView {
  std::size_t parameter_count = 0;
  std::vector<std::pair<std::size_t, double>> entries;
};

struct ClientUpdate {
  std::size_t round = 0;
  std::size_t client_id = 0;
  std::size_t parameter_count = 0;
  /// Masked values in ascending index order, N/2 per ciphertext, last one zero-padded.
  std::vector<ckks::Ciphertext> encrypted_chunks;
  std::size_t encrypted_count = 0;
  PlaintextView plaintext_sparse;
  std::uint64_t mask_fingerprint = 0;
  double train_loss = 0.0;
  double train_ms = 0.0;
  double encrypt_ms = 0.0;
};

/// Output of local work before packaging. `batch` is kept only in single-step
/// mode, as ground truth for the attack harness; it is never sent.
struct LocalResult {
  std::vector<double> delta;
  double loss = 0.0;
  double train_ms = 0.0;
  std::vector<model::Example> batch;
};

/// (global - local) / eta.
std::vector<double> pseudo_gradient(const model::ModelState& global, const model::ModelState& local, double eta);

/**
 * Client-side training for one round.
 *
 * Default mode runs cfg.local_epochs of SGD from the global weights with a
 * fresh optimizer (momentum and step schedule restart every round) and
 * returns the pseudo-gradient at cfg.server_lr. Single-step mode returns the plain
 * gradient of one shuffled batch.
 */
LocalResult local_update(const model::ModelState& global, const model::Dataset& shard, const FlConfig& cfg,
                         std::size_t round, std::size_t client_id);

/// Clips `delta` to [-clip, clip], encrypts the masked coordinates and keeps the rest in the clear.
ClientUpdate seal_update(std::span<const double> delta, const sensitivity::SelectionMask& mask,
                         const ckks::CkksContext& ctx, const ckks::PublicKey& pk, double clip, std::uint64_t seed);

ClientUpdate client_update(const model::ModelState& global, const model::Dataset& shard, const FlConfig& cfg,
                           const sensitivity::SelectionMask& mask, const KeyMaterial& keys, std::size_t round,
                           std::size_t client_id);

struct AggregateResult {
  model::GradientVector gradient;
  double aggregate_he_ms = 0.0;
  double aggregate_plain_ms = 0.0;
  double decrypt_ms = 0.0;
};

/**
 * Server aggregation. Ciphertext chunks are summed in client order, scaled by
 * 1/K, rescaled, decrypted and scattered back through the mask; the clear
 * part is summed in client order and divided by K.
 *
 * Throws ProtocolError when updates disagree on round, mask or shape, and
 * ConfigError when the parameter set has no level left for the 1/K product.
 */
AggregateResult aggregate(std::span<const ClientUpdate> updates, const sensitivity::SelectionMask& mask,
                          const ckks::CkksContext& ctx, const ckks::SecretKey& sk);

/// m <- m - eta * g.
void apply_global_update(model::ModelState& m, const model::GradientVector& g, double eta);

}  // namespace hefl::fl

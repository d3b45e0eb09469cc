// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/fl/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/model/network.hpp"
#include "hefl/model/training.hpp"

namespace hefl::fl {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

KeyMaterial generate_keys(const std::string& ckks_profile, std::uint64_t seed) {
  KeyMaterial k;
  k.ctx = ckks::CkksContext::create(ckks::CkksParams::from_profile(ckks_profile));
  k.keys = ckks::keygen(*k.ctx, derive_seed(seed, "keygen"));
  return k;
}

std::vector<double> pseudo_gradient(const model::ModelState& global, const model::ModelState& local, double eta) {
  if (global.size() != local.size()) throw UsageError("pseudo_gradient: model sizes differ");
  std::vector<double> d(global.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (global.flat()[i] - local.flat()[i]) / eta;
  return d;
}

LocalResult local_update(const model::ModelState& global, const model::Dataset& shard, const FlConfig& cfg,
                         std::size_t round, std::size_t client_id) {
  const auto start = Clock::now();
  const std::uint64_t seed = derive_seed(cfg.seed, "client", {round, client_id});
  LocalResult r;
  if (cfg.single_step) {
    std::vector<std::size_t> order(shard.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    const std::size_t take = std::min(cfg.batch_size, shard.size());
    for (std::size_t k = 0; k < take; ++k) r.batch.push_back(shard.examples[order[k]]);
    auto lg = model::forward_backward(global, r.batch);
    r.delta = std::move(lg.gradient.values);
    r.loss = lg.loss;
  } else {
    model::ModelState local = global;
    auto opt = model::OptimizerState::create(cfg.optimizer, local.size());
    if (cfg.local_epochs > 0) {
      r.loss = model::train_local(local, shard, opt, cfg.local_epochs, cfg.batch_size, seed).avg_loss;
    } else {
      r.loss = model::evaluate(local, shard).avg_loss;
    }
    r.delta = pseudo_gradient(global, local, cfg.server_lr);
  }
  r.train_ms = ms_since(start);
  return r;
}

ClientUpdate seal_update(std::span<const double> delta, const sensitivity::SelectionMask& mask,
                         const ckks::CkksContext& ctx, const ckks::PublicKey& pk, double clip, std::uint64_t seed) {
  if (mask.parameter_count != delta.size()) throw UsageError("mask does not match the update length");
  const auto start = Clock::now();
  ClientUpdate u;
  u.parameter_count = delta.size();
  u.mask_fingerprint = mask.fingerprint();
  u.encrypted_count = mask.size();

  std::vector<double> clipped(delta.begin(), delta.end());
  for (auto& v : clipped) v = std::clamp(v, -clip, clip);

  const auto in = mask.membership();
  u.plaintext_sparse.parameter_count = delta.size();
  u.plaintext_sparse.entries.reserve(delta.size() - mask.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (!in[i]) u.plaintext_sparse.entries.emplace_back(i, clipped[i]);
  }

  const std::size_t slots = ctx.params().slot_count();
  std::vector<double> chunk;
  for (std::size_t c = 0, pos = 0; pos < mask.size(); ++c, pos += slots) {
    const std::size_t end = std::min(mask.size(), pos + slots);
    chunk.assign(slots, 0.0);
    for (std::size_t k = pos; k < end; ++k) chunk[k - pos] = clipped[mask.encrypted_indices[k]];
    u.encrypted_chunks.push_back(ckks::encrypt(ctx, ckks::encode(ctx, chunk), pk, derive_seed(seed, {c})));
  }
  u.encrypt_ms = ms_since(start);
  return u;
}

ClientUpdate client_update(const model::ModelState& global, const model::Dataset& shard, const FlConfig& cfg,
                           const sensitivity::SelectionMask& mask, const KeyMaterial& keys, std::size_t round,
                           std::size_t client_id) {
  try {
    LocalResult local = local_update(global, shard, cfg, round, client_id);
    ClientUpdate u = seal_update(local.delta, mask, *keys.ctx, keys.keys.public_key, cfg.clip,
                                 derive_seed(cfg.seed, "enc", {round, client_id}));
    u.round = round;
    u.client_id = client_id;
    u.train_loss = local.loss;
    u.train_ms = local.train_ms;
    return u;
  } catch (Error& e) {
    e.add_context("round " + std::to_string(round) + " client " + std::to_string(client_id));
    throw;
  }
}

AggregateResult aggregate(std::span<const ClientUpdate> updates, const sensitivity::SelectionMask& mask,
                          const ckks::CkksContext& ctx, const ckks::SecretKey& sk) {
  if (updates.empty()) throw ProtocolError("aggregate called with no client updates");
  const std::size_t n = mask.parameter_count;
  const std::size_t slots = ctx.params().slot_count();
  const std::size_t chunks = (mask.size() + slots - 1) / slots;
  const std::uint64_t fp = mask.fingerprint();
  const ClientUpdate& first = updates.front();
  for (const auto& u : updates) {
    const std::string who = "client " + std::to_string(u.client_id);
    if (u.round != first.round) throw ProtocolError(who + " sent an update for a different round");
    if (u.mask_fingerprint != fp) throw ProtocolError(who + " used a different selection mask");
    if (u.parameter_count != n || u.encrypted_count != mask.size() || u.encrypted_chunks.size() != chunks ||
        u.plaintext_sparse.entries.size() != n - mask.size()) {
      throw ProtocolError(who + " sent an update whose shape does not match the mask");
    }
    for (std::size_t k = 0; k < u.plaintext_sparse.entries.size(); ++k) {
      if (u.plaintext_sparse.entries[k].first != first.plaintext_sparse.entries[k].first) {
        throw ProtocolError(who + " sent clear coordinates outside the mask complement");
      }
    }
  }
  const double k_clients = static_cast<double>(updates.size());
  AggregateResult out;
  out.gradient.values.assign(n, 0.0);
  out.gradient.batch_count = updates.size();

  auto start = Clock::now();
  std::vector<ckks::Ciphertext> sums;
  sums.reserve(chunks);
  try {
    for (std::size_t c = 0; c < chunks; ++c) {
      ckks::Ciphertext acc = updates[0].encrypted_chunks[c];
      for (std::size_t i = 1; i < updates.size(); ++i) acc = ckks::he_add(ctx, acc, updates[i].encrypted_chunks[c]);
      sums.push_back(ckks::rescale(ctx, ckks::he_mul_scalar(ctx, acc, 1.0 / k_clients)));
    }
  } catch (const ckks::CkksError& e) {
    if (e.code() == ckks::CkksErrc::depth_exhausted) {
      throw ConfigError(std::string("ckks parameters leave no level for averaging: ") + e.what());
    }
    throw;
  }
  out.aggregate_he_ms = ms_since(start);

  start = Clock::now();
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto values = ckks::decode(ctx, ckks::decrypt(ctx, sums[c], sk));
    const std::size_t pos = c * slots;
    const std::size_t end = std::min(mask.size(), pos + slots);
    for (std::size_t k = pos; k < end; ++k) out.gradient.values[mask.encrypted_indices[k]] = values[k - pos];
  }
  out.decrypt_ms = ms_since(start);

  start = Clock::now();
  for (std::size_t k = 0; k < first.plaintext_sparse.entries.size(); ++k) {
    double sum = 0.0;
    for (const auto& u : updates) sum += u.plaintext_sparse.entries[k].second;
    out.gradient.values[first.plaintext_sparse.entries[k].first] = sum / k_clients;
  }
  out.aggregate_plain_ms = ms_since(start);
  return out;
}

void apply_global_update(model::ModelState& m, const model::GradientVector& g, double eta) {
  if (g.values.size() != m.size()) throw UsageError("apply_global_update: gradient length differs from model");
  auto w = m.flat();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * g.values[i];
}

}  // namespace hefl::fl

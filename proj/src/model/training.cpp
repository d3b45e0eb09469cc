// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/training.hpp"

#include <algorithm>
#include <numeric>

#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/model/network.hpp"

namespace hefl::model {

LocalTrainResult train_local(ModelState& model, const Dataset& shard, OptimizerState& opt, std::size_t epochs,
                             std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (shard.empty()) throw ConfigError("cannot train on an empty shard");
  LocalTrainResult result;
  double loss_sum = 0.0;
  std::vector<std::size_t> order(shard.size());
  std::vector<Example> batch;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "epoch", {e}));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(shard.examples[order[k]]);
      const LossAndGradient lg = forward_backward(model, batch);
      sgd_step(model, lg.gradient, opt);
      loss_sum += lg.loss;
      ++result.steps;
    }
    ++opt.epoch_counter;
    lr_schedule_step(opt);
  }
  if (result.steps > 0) result.avg_loss = loss_sum / static_cast<double>(result.steps);
  return result;
}

EvalResult evaluate(const ModelState& model, const Dataset& data) {
  EvalResult r;
  if (data.empty()) return r;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  for (const Example& ex : data.examples) {
    const auto logits = forward_logits<double>(model, ex.features);
    const auto best = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == ex.label) ++correct;
    loss_sum += example_loss(model, ex.features, one_hot(ex.label, model.arch().classes));
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  r.avg_loss = loss_sum / static_cast<double>(data.size());
  return r;
}

}  // namespace hefl::model

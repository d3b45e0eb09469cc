// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "hefl/model/architecture.hpp"
#include "hefl/model/dataset.hpp"
#include "hefl/model/optimizer.hpp"

namespace hefl::model {

struct LocalTrainResult {
  double avg_loss = 0.0;  // mean batch loss over all steps
  std::size_t steps = 0;
};

/**
 * Runs `epochs` passes of minibatch SGD over `shard`, updating `model` and
 * `opt` in place. Each epoch reshuffles with a stream derived from `seed`
 * and the epoch index, then advances opt.epoch_counter and the schedule.
 */
LocalTrainResult train_local(ModelState& model, const Dataset& shard, OptimizerState& opt, std::size_t epochs,
                             std::size_t batch_size, std::uint64_t seed);

struct EvalResult {
  double accuracy = 0.0;
  double avg_loss = 0.0;
};

/// Argmax accuracy and mean loss. An empty dataset scores 0 accuracy and 0 loss.
EvalResult evaluate(const ModelState& model, const Dataset& data);

}  // namespace hefl::model

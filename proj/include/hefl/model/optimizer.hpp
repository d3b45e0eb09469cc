// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hefl/model/architecture.hpp"

namespace hefl::model {

struct OptimizerConfig {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 4e-4;
  std::size_t step_size = 10;  // epochs between lr decays
  double gamma = 0.1;

  /// Throws ConfigError unless lr > 0, 0 <= momentum < 1, weight_decay >= 0, step_size >= 1, gamma > 0.
  void validate() const;
};

/// SGD with classic momentum, L2 weight decay and a StepLR schedule.
struct OptimizerState {
  std::vector<double> momentum_buffers;
  double base_lr = 0.01;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 4e-4;
  std::size_t step_size = 10;
  double gamma = 0.1;
  std::size_t epoch_counter = 0;

  /// Zero momentum buffers; `epoch_counter` lets a resumed run continue the schedule.
  static OptimizerState create(const OptimizerConfig& config, std::size_t parameter_count,
                               std::size_t epoch_counter = 0);
};

/// v <- mu*v + (g + lambda*w); w <- w - lr*v.
void sgd_step(ModelState& m, const GradientVector& g, OptimizerState& opt);
void sgd_update(std::span<double> w, std::span<const double> g, OptimizerState& opt);

/// Sets lr = base_lr * gamma^floor(epoch_counter / step_size). The caller advances epoch_counter.
void lr_schedule_step(OptimizerState& opt);

}  // namespace hefl::model

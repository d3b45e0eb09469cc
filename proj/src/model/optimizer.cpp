// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/optimizer.hpp"

#include <cmath>
#include <string>

#include "hefl/common/error.hpp"

namespace hefl::model {

void OptimizerConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive, got " + std::to_string(lr));
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (step_size == 0) throw ConfigError("lr_step must be at least 1");
  if (!(gamma > 0.0)) throw ConfigError("lr_gamma must be positive");
}

OptimizerState OptimizerState::create(const OptimizerConfig& config, std::size_t parameter_count,
                                      std::size_t epoch_counter) {
  config.validate();
  OptimizerState s;
  s.momentum_buffers.assign(parameter_count, 0.0);
  s.base_lr = config.lr;
  s.lr = config.lr;
  s.momentum = config.momentum;
  s.weight_decay = config.weight_decay;
  s.step_size = config.step_size;
  s.gamma = config.gamma;
  s.epoch_counter = epoch_counter;
  lr_schedule_step(s);
  return s;
}

void sgd_update(std::span<double> w, std::span<const double> g, OptimizerState& opt) {
  if (g.size() != w.size() || opt.momentum_buffers.size() != w.size()) {
    throw UsageError("sgd_step: gradient, momentum and parameter lengths differ");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    double& v = opt.momentum_buffers[i];
    v = opt.momentum * v + (g[i] + opt.weight_decay * w[i]);
    w[i] -= opt.lr * v;
  }
}

void sgd_step(ModelState& m, const GradientVector& g, OptimizerState& opt) { sgd_update(m.flat(), g.values, opt); }

void lr_schedule_step(OptimizerState& opt) {
  const std::size_t decays = opt.step_size == 0 ? 0 : opt.epoch_counter / opt.step_size;
  double lr = opt.base_lr;
  for (std::size_t i = 0; i < decays; ++i) lr *= opt.gamma;
  opt.lr = lr;
}

}  // namespace hefl::model

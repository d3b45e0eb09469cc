// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "hefl/model/architecture.hpp"
#include "hefl/model/dataset.hpp"
#include "hefl/model/dual.hpp"

namespace hefl::model {

/**
 * Runs one example through the network, returns its loss and adds
 * `weight * dLoss/dparams` into `grad`.
 *
 * T is double for training, or Dual when the caller wants derivatives of the
 * gradient itself with respect to the input or target (gradient matching).
 * Parameters are always plain doubles. `target` is a class distribution for
 * cross-entropy (need not be one-hot) or the regression target for squared
 * error. Throws NumericError naming the layer if a non-finite value appears.
 */
template <typename T>
T accumulate_example_gradient(const ModelState& model, std::span<const T> input, std::span<const T> target,
                              std::span<T> grad, double weight);

template <typename T>
std::vector<T> forward_logits(const ModelState& model, std::span<const T> input);

extern template double accumulate_example_gradient<double>(const ModelState&, std::span<const double>,
                                                           std::span<const double>, std::span<double>, double);
extern template Dual accumulate_example_gradient<Dual>(const ModelState&, std::span<const Dual>,
                                                       std::span<const Dual>, std::span<Dual>, double);
extern template std::vector<double> forward_logits<double>(const ModelState&, std::span<const double>);
extern template std::vector<Dual> forward_logits<Dual>(const ModelState&, std::span<const Dual>);

std::vector<double> one_hot(int label, std::size_t classes);

/// Loss of one example without the backward pass.
double example_loss(const ModelState& model, std::span<const double> input, std::span<const double> target);

struct LossAndGradient {
  double loss = 0.0;
  GradientVector gradient;
};

/// Mean loss and mean gradient over a non-empty batch, targets one-hot.
LossAndGradient forward_backward(const ModelState& model, std::span<const Example> batch);

}  // namespace hefl::model

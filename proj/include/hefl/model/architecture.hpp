// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hefl::model {

enum class ArchKind {
  linear,  // single dense layer, squared-error loss
  mlp2,    // dense 64, sigmoid, dense 32, sigmoid, dense C; softmax cross-entropy
  conv_s,  // 5x5 conv (4 maps, same padding), sigmoid, 2x2 average pool, dense C
};

enum class LossKind { cross_entropy, squared_error };

struct InputShape {
  std::size_t channels = 1;
  std::size_t height = 8;
  std::size_t width = 8;

  std::size_t size() const { return channels * height * width; }
  friend bool operator==(const InputShape&, const InputShape&) = default;
};

struct Architecture {
  ArchKind kind = ArchKind::mlp2;
  InputShape input;
  std::size_t classes = 10;

  /// Accepts "linear", "mlp2"/"MLP-2", "conv-s"/"CONV-S".
  static Architecture parse(std::string_view name, InputShape input, std::size_t classes);

  LossKind loss() const { return kind == ArchKind::linear ? LossKind::squared_error : LossKind::cross_entropy; }
  std::string name() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// One named parameter tensor inside the flat parameter vector.
struct LayerSlot {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t fan_in = 0;
};

/// Ordered, contiguous, non-overlapping slots covering [0, total).
struct Layout {
  std::vector<LayerSlot> slots;
  std::size_t total = 0;

  const LayerSlot& find(std::string_view name) const;
};

Layout layout_for(const Architecture& arch);

/**
 * Parameters of one model: the architecture, its layout and the flat
 * parameter vector. A plain value type; copies are independent.
 */
class ModelState {
 public:
  ModelState(Architecture arch, std::vector<double> params);

  const Architecture& arch() const { return arch_; }
  const Layout& layout() const { return layout_; }
  std::span<const double> flat() const { return params_; }
  std::span<double> flat() { return params_; }
  std::size_t size() const { return params_.size(); }

  std::span<const double> layer(std::string_view name) const;

  friend bool operator==(const ModelState& a, const ModelState& b) {
    return a.arch_ == b.arch_ && a.params_ == b.params_;
  }

 private:
  Architecture arch_;
  Layout layout_;
  std::vector<double> params_;
};

/// Per-parameter gradient aligned with a ModelState layout.
struct GradientVector {
  std::vector<double> values;
  std::size_t batch_count = 0;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
ModelState build_model(const Architecture& arch, std::uint64_t seed);

}  // namespace hefl::model

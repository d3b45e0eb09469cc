// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hefl/model/architecture.hpp"

namespace hefl::model {

struct Example {
  std::vector<double> features;
  int label = 0;
};

/// A labelled example set. Client shards use the same type.
struct Dataset {
  InputShape shape;
  std::size_t class_count = 10;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  /// Throws if any label is outside [0, class_count) or a feature vector has the wrong length.
  void validate() const;
};
using DatasetShard = Dataset;

/**
 * Synthetic 8x8 grayscale "toy-vision" set: one random template per class
 * (drawn from `template_seed`), each example a template plus Gaussian pixel
 * noise, clamped to [0, 1]. Labels cycle through the classes before a
 * shuffle, so any prefix of size k*classes is balanced.
 */
Dataset make_toy_vision(std::size_t count, std::uint64_t template_seed, std::uint64_t sample_seed,
                        std::size_t classes = 10, double noise = 0.25);

/// Random disjoint split into n shards whose sizes differ by at most one.
std::vector<DatasetShard> partition_iid(const Dataset& data, std::size_t n_clients, std::uint64_t seed);

std::vector<std::size_t> class_histogram(const Dataset& data);

/// Reads one CIFAR-10 binary batch (3073-byte records: label, then 3x32x32 pixels).
Dataset load_cifar10_batch(const std::filesystem::path& file);
/// Reads data_batch_1..5.bin (train) or test_batch.bin from a directory.
Dataset load_cifar10(const std::filesystem::path& dir, bool train);

}  // namespace hefl::model

// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"

namespace hefl::model {

void Dataset::validate() const {
  const std::size_t n = shape.size();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= class_count) {
      throw ConfigError("example " + std::to_string(i) + " has label " + std::to_string(ex.label) +
                        " outside [0, " + std::to_string(class_count) + ")");
    }
    if (ex.features.size() != n) {
      throw ConfigError("example " + std::to_string(i) + " has " + std::to_string(ex.features.size()) +
                        " features, expected " + std::to_string(n));
    }
  }
}

Dataset make_toy_vision(std::size_t count, std::uint64_t template_seed, std::uint64_t sample_seed,
                        std::size_t classes, double noise) {
  if (classes == 0) throw ConfigError("toy-vision needs at least one class");
  Dataset d;
  d.shape = InputShape{1, 8, 8};
  d.class_count = classes;
  const std::size_t pixels = d.shape.size();

  Rng trng(template_seed);
  std::vector<std::vector<double>> templates(classes, std::vector<double>(pixels));
  for (auto& t : templates) {
    for (auto& px : t) px = trng.uniform01();
  }

  Rng srng(sample_seed);
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = static_cast<int>(i % classes);
  srng.shuffle(std::span<int>(labels));
  d.examples.reserve(count);
  for (int label : labels) {
    Example ex;
    ex.label = label;
    ex.features = templates[static_cast<std::size_t>(label)];
    for (auto& px : ex.features) px = std::clamp(px + noise * srng.normal(), 0.0, 1.0);
    d.examples.push_back(std::move(ex));
  }
  return d;
}

std::vector<DatasetShard> partition_iid(const Dataset& data, std::size_t n_clients, std::uint64_t seed) {
  if (n_clients == 0) throw ConfigError("partition needs at least one client");
  if (n_clients > data.size()) {
    throw ConfigError("cannot split " + std::to_string(data.size()) + " examples across " +
                      std::to_string(n_clients) + " clients");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<DatasetShard> shards(n_clients);
  const std::size_t base = data.size() / n_clients;
  const std::size_t extra = data.size() % n_clients;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < n_clients; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    shards[c].shape = data.shape;
    shards[c].class_count = data.class_count;
    shards[c].examples.reserve(len);
    for (std::size_t k = 0; k < len; ++k) shards[c].examples.push_back(data.examples[order[pos++]]);
  }
  return shards;
}

std::vector<std::size_t> class_histogram(const Dataset& data) {
  std::vector<std::size_t> h(data.class_count, 0);
  for (const Example& ex : data.examples) ++h.at(static_cast<std::size_t>(ex.label));
  return h;
}

Dataset load_cifar10_batch(const std::filesystem::path& file) {
  constexpr std::size_t kRecord = 3073;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty() || bytes.size() % kRecord != 0) {
    throw ParseError(bytes.size() - bytes.size() % kRecord,
                     file.string() + ": size is not a multiple of the 3073-byte record");
  }
  Dataset d;
  d.shape = InputShape{3, 32, 32};
  d.class_count = 10;
  const std::size_t n = bytes.size() / kRecord;
  d.examples.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const unsigned char* rec = bytes.data() + r * kRecord;
    if (rec[0] > 9) throw ParseError(r * kRecord, "label byte " + std::to_string(rec[0]) + " out of range");
    Example ex;
    ex.label = rec[0];
    ex.features.resize(kRecord - 1);
    for (std::size_t i = 0; i + 1 < kRecord; ++i) ex.features[i] = rec[i + 1] / 255.0;
    d.examples.push_back(std::move(ex));
  }
  return d;
}

Dataset load_cifar10(const std::filesystem::path& dir, bool train) {
  if (!train) return load_cifar10_batch(dir / "test_batch.bin");
  Dataset all;
  all.shape = InputShape{3, 32, 32};
  for (int b = 1; b <= 5; ++b) {
    Dataset part = load_cifar10_batch(dir / ("data_batch_" + std::to_string(b) + ".bin"));
    std::move(part.examples.begin(), part.examples.end(), std::back_inserter(all.examples));
  }
  return all;
}

}  // namespace hefl::model

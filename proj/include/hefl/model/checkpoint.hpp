// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hefl/model/architecture.hpp"

namespace hefl::model {

/**
 * On-disk training snapshot. The file is one line of JSON (architecture,
 * layout, round, blob directory, free-form meta) terminated by '\n',
 * followed by the named blobs as little-endian f64 arrays in directory
 * order. The blob named "weights" is the model's flat parameter vector.
 */
struct Checkpoint {
  Architecture arch;
  std::size_t round = 0;
  std::vector<std::pair<std::string, std::vector<double>>> blobs;
  nlohmann::json meta = nlohmann::json::object();

  const std::vector<double>* blob(const std::string& name) const;
  ModelState model() const;
};

/// Writes to a sibling temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws IoError / ParseError on malformed files and ConfigError if the layout disagrees with the architecture.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hefl::model

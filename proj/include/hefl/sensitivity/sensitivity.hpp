// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hefl/model/architecture.hpp"
#include "hefl/model/dataset.hpp"

namespace hefl::sensitivity {

enum class Method { magnitude, jacobian };

Method parse_method(std::string_view name);
const char* to_string(Method m);

struct SensitivityMap {
  std::vector<double> scores;
  Method method = Method::magnitude;
  std::size_t source_round = 0;
};

/// Sorted, strictly increasing indices of the parameters that get encrypted.
struct SelectionMask {
  std::vector<std::size_t> encrypted_indices;
  std::size_t parameter_count = 0;
  double ratio = 0.0;

  std::size_t size() const { return encrypted_indices.size(); }
  /// Per-parameter membership flags.
  std::vector<bool> membership() const;
  /// Stable 64-bit digest of (parameter_count, indices); equal masks give equal digests.
  std::uint64_t fingerprint() const;
  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
};

/// scores[i] = |values[i]|. Throws NumericError on non-finite input.
SensitivityMap magnitude_map(std::span<const double> values);
SensitivityMap magnitude_map(const model::GradientVector& g);
SensitivityMap magnitude_map(const model::ModelState& m);

/**
 * Mean over batches of the squared batch gradient, per parameter. This is
 * the diagonal empirical Fisher, used as a cheap stand-in for second-order
 * sensitivity.
 */
SensitivityMap jacobian_map(const model::ModelState& m, std::span<const std::vector<model::Example>> batches);

/// k = round_half_up(r * n), clamped to [0, n].
std::size_t selection_count(double r, std::size_t n);

/// The k largest scores; ties go to the lower index. Throws UsageError unless 0 <= r <= 1.
SelectionMask select_top_r(const SensitivityMap& s, double r);

/// JSON document {"ratio", "parameter_count", "encrypted_indices": [...]}.
std::string mask_to_json(const SelectionMask& mask);
SelectionMask mask_from_json(std::string_view text);

}  // namespace hefl::sensitivity

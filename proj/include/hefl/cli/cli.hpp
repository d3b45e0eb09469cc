// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hefl::cli {

/**
 * Runs one `hefl` invocation. `args` excludes the program name. Returns the
 * process exit code: 0 on success, 2 for usage errors (including unknown
 * flags), otherwise the error category code.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::size_t size = 0;
  std::string operation;  // encode, encrypt, add, mul-rescale, decrypt
  double median_ms = 0.0;
  std::size_t reps = 0;
};

/// Median-of-`reps` wall times per operation for each vector size. Sizes
/// above the slot count are split into slot-sized chunks.
std::vector<BenchRow> bench(const std::string& ckks_profile, std::span<const std::size_t> sizes, std::size_t reps,
                            std::uint64_t seed);

std::string bench_csv(std::span<const BenchRow> rows);

}  // namespace hefl::cli

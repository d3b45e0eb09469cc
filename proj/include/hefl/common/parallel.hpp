// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace hefl {

/// Worker cap from the HEFL_THREADS environment variable, or hardware concurrency.
std::size_t default_worker_count();

/**
 * Runs `body(i)` for i in [0, count) on up to `workers` threads.
 *
 * Every index runs even if another throws; afterwards the exception from the
 * lowest failing index is rethrown, so error reporting does not depend on
 * scheduling.
 */
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace hefl

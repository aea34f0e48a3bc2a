// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace beamsim
{

// Worker count: BEAMSIM_THREADS when set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Work is split in contiguous blocks; callers
// write results into per-index slots so the outcome is order independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace beamsim

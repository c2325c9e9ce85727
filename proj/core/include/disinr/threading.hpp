#pragma once

#include <cstdint>
#include <functional>

namespace disinr {

// Worker count: DISINR_THREADS env var if set, else hardware concurrency
// (capped at 8). Always >= 1.
int thread_count();

// Runs fn(begin, end) over a partition of [0, n). Chunk boundaries depend
// only on n and grain, never on the worker count, and chunks write disjoint
// outputs, so results are bitwise reproducible. Reductions must not use this
// directly; accumulate per-chunk and combine in chunk order instead.
void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace disinr

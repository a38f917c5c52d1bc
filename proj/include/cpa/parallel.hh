/* parallel.hh -- bounded worker pool for independent exact computations */
#pragma once

#include <cstddef>
#include <functional>

namespace cpa {

/// Worker cap: the CPA_THREADS environment variable when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
int thread_count();

/// Run fn(0..n-1) on up to thread_count() workers.  Iterations must be
/// independent; deterministic output is the caller's job (collect per
/// index, reduce in order).  The first exception thrown by any
/// iteration is re-thrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cpa

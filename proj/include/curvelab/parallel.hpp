#pragma once

#include <cstddef>
#include <functional>

namespace curvelab {

/// Worker count: CURVELAB_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Work is split into contiguous chunks; the first exception thrown by any
/// chunk is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace curvelab

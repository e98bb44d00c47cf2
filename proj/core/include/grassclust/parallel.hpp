#pragma once

#include <cstddef>
#include <functional>

namespace grassclust {

/// requested > 0 is returned unchanged; otherwise GRASSCLUST_THREADS, then
/// the hardware concurrency, then 1.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Iterations must be
/// independent. If any iteration throws, the exception from the lowest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace grassclust

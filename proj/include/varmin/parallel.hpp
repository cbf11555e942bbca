#pragma once

#include <cstddef>
#include <functional>

namespace varmin {

/// Worker cap from VARMIN_THREADS (0 or unset = hardware concurrency).
unsigned thread_budget();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = thread_budget()).
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace varmin

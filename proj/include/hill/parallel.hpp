#pragma once

#include <cstddef>
#include <functional>

namespace hill {

/// Number of worker threads used by parallel loops.  Initialised from the
/// HILL_THREADS environment variable, falling back to the hardware count.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n).  Each index is processed exactly once;
/// results written to per-index slots are independent of scheduling.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hill

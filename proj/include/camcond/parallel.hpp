#pragma once

#include <functional>

namespace camcond {

/// Number of worker threads used when a caller passes threads <= 0.
int default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` threads with static
/// contiguous chunking. The first exception thrown by any task is rethrown
/// after all workers have joined.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace camcond

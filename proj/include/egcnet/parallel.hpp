#pragma once

#include <cstddef>
#include <functional>

namespace egcnet {

/// Effective worker count: hardware concurrency capped by the EGC_THREADS
/// environment variable (a value of 1 disables threading).
int thread_cap();

/// Runs fn(i) for i in [0, n). Work items must be independent; results
/// should be written to pre-sized storage by index so the output does not
/// depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace egcnet

#pragma once

#include <functional>

namespace beaconopt {

/// Worker-thread cap: BEACONOPT_THREADS env var when set (>=1), otherwise
/// hardware concurrency.
int worker_thread_count();

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
/// chunks are distributed dynamically, so fn must not depend on schedule.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace beaconopt

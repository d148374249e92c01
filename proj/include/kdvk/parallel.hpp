#pragma once

#include <cstddef>
#include <functional>

namespace kdvk {

// Worker count: KDVK_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, count). Work is split into contiguous blocks, one
// per worker. Results must be written to per-index slots so the outcome does
// not depend on the number of workers. The first exception thrown by any
// worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kdvk

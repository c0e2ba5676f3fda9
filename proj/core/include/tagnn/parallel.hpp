#pragma once

#include <cstddef>
#include <functional>

namespace tagnn {

// Worker threads used for per-channel data parallelism. Results are
// bit-identical for any thread count: workers write to disjoint slots and
// reductions happen afterwards in a fixed order.
unsigned worker_threads();
void set_worker_threads(unsigned n);

// Calls fn(i) for i in [0, n), partitioned contiguously across workers.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tagnn

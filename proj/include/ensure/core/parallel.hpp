#pragma once

#include <cstddef>
#include <functional>

namespace ensure {

// Worker count: ENSURE_LAB_THREADS if set (>= 1), else the hardware count.
auto worker_count() -> int;

// Calls fn(i) for i in [0, n), spread over up to worker_count() threads.
// The first exception thrown is rethrown after all workers finish.
void parallel_for(std::size_t n, std::function<void(std::size_t)> const &fn);

} // namespace ensure

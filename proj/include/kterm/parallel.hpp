#pragma once

#include <cstddef>
#include <functional>

namespace kterm {

// Worker count: KERNEL_NTERM_THREADS if set and positive, else the hardware concurrency.
unsigned thread_count();

// Runs fn(i) for i in [0, n). Each index writes only its own result slot, so
// results do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace kterm

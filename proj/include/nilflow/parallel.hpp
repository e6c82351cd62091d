#pragma once

#include <cstddef>
#include <functional>

namespace nilflow {

/// Worker cap: NILFLOW_THREADS if set and positive, else the hardware count.
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Iterations are split into contiguous
/// blocks, one per worker; callers write results by index so the outcome
/// does not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nilflow

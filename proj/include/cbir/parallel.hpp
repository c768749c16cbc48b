#pragma once

#include <cstddef>
#include <functional>

namespace cbir {

/// Worker count: CBIR_THREADS if set and positive, else hardware concurrency.
std::size_t thread_budget();

/// Runs fn(i) for i in [0, n) over up to thread_budget() threads. fn must only
/// write to slots owned by i; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cbir

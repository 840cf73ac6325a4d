#pragma once

#include <cstddef>
#include <functional>

namespace fden {

/// Worker count: FDEN_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n); results must be written to per-index slots.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fden

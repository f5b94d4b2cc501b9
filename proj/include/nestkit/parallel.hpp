#pragma once

#include <cstddef>
#include <functional>

namespace nestkit {

// Runs fn(0..n-1), splitting the index range across `threads` workers.
// Results must be written to per-index slots so the outcome does not
// depend on the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace nestkit

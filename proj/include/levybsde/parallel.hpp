#pragma once
#include <cstddef>
#include <functional>

namespace levybsde {

// Worker count resolution: the LEVY_BSDE_THREADS environment variable, when
// set to a positive value, pins the count; otherwise `requested` (0 =
// hardware default).
int resolve_threads(int requested = 0);

// Runs fn(i) for i in [0, n). Each index must be a pure function of its
// inputs writing only to its own output slot; the mapping of indices to
// workers is then irrelevant to the results, which makes every reduction
// downstream independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace levybsde

#include "levybsde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace levybsde {

int resolve_threads(int requested) {
  // An explicit environment setting pins the worker count outright, so
  // thread-count reproducibility checks mean the same thing on any machine
  // (setting it below the core count caps parallelism; above, the pool is
  // oversubscribed, which only reshuffles scheduling).
  if (const char* env = std::getenv("LEVY_BSDE_THREADS")) {
    const int c = std::atoi(env);
    if (c > 0) return c;
  }
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads) {
  const int nt = resolve_threads(threads);
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Dynamic chunks off a shared counter; outputs are indexed, so scheduling
  // cannot affect results.
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * static_cast<std::size_t>(nt)));
  auto worker = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      const std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt) - 1);
  for (int w = 1; w < nt; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace levybsde

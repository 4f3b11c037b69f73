#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace corrdyn {

// Worker count: CORRDYN_THREADS pins it (results are identical regardless),
// default hardware concurrency.
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("CORRDYN_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1 && v <= 256) hw = v;
  }
  return hw;
}

// Static block partition of [0, n). Each index must write only to its own
// output slot (or to data merged in a schedule-independent way) so that the
// result is identical for every worker count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  int workers = worker_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t nw = static_cast<std::size_t>(workers);
  if (nw > n) nw = n;
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::size_t chunk = (n + nw - 1) / nw;
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace corrdyn

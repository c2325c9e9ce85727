#include "disinr/threading.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace disinr {
namespace {

int resolve_thread_count() {
  if (const char* env = std::getenv("DISINR_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

}  // namespace

int thread_count() {
  static const int n = resolve_thread_count();
  return n;
}

void parallel_for(std::int64_t n, std::int64_t grain,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  grain = std::max<std::int64_t>(1, grain);
  const int nt = thread_count();
  if (nt == 1 || n <= grain) {
    fn(0, n);
    return;
  }
  // Chunk boundaries depend only on (n, grain); workers pull chunks from a
  // shared counter. Chunks have disjoint index ranges, so scheduling order
  // cannot affect results.
  const std::int64_t chunks = (n + grain - 1) / grain;
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      const std::int64_t b = c * grain;
      fn(b, std::min(n, b + grain));
    }
  };
  std::vector<std::thread> threads;
  const int spawn = static_cast<int>(std::min<std::int64_t>(nt, chunks)) - 1;
  threads.reserve(static_cast<std::size_t>(spawn));
  for (int i = 0; i < spawn; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
}

}  // namespace disinr

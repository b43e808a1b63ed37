#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace roml {

inline unsigned worker_count() {
  if (const char* env = std::getenv("ROML_JOBS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(i) for i in [0, count).  Results stay deterministic as long as
// fn(i) derives its randomness from i and writes only to per-index slots;
// callers reduce afterwards in index order.
inline void parallel_for(std::uint64_t count,
                         const std::function<void(std::uint64_t)>& fn,
                         unsigned workers = 0) {
  if (workers == 0) workers = worker_count();
  if (workers <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  constexpr std::uint64_t kChunk = 8;
  auto body = [&] {
    for (;;) {
      const std::uint64_t base = next.fetch_add(kChunk);
      if (base >= count) return;
      const std::uint64_t end = std::min(base + kChunk, count);
      for (std::uint64_t i = base; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

}  // namespace roml

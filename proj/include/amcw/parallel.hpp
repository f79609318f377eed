#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace amcw {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs `body(begin, end)` over disjoint blocks of [0, n). Work is assigned
/// by index range, so results must be written by index; outputs are then
/// identical for any thread count.
inline void parallel_for_blocks(std::size_t n, int threads,
                                const std::function<void(std::size_t, std::size_t)>& body) {
  const int t = std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)),
                                      n == 0 ? 1 : n);
  if (n == 0) return;
  if (t <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  const std::size_t chunk = (n + static_cast<std::size_t>(t) - 1) / static_cast<std::size_t>(t);
  for (int i = 0; i < t; ++i) {
    const std::size_t b = static_cast<std::size_t>(i) * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace amcw

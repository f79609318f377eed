#pragma once

#include <cstdint>
#include <random>

namespace amcw::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words; used to spread seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stateless substream seed for work item `a` under `master`. The result
/// depends only on (master, a), never on how many draws other items made,
/// so parallel and sequential schedules produce identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) noexcept {
  return mix64(master ^ mix64(a + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return derive_seed(derive_seed(master, a), b);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t a) {
  return std::mt19937_64(derive_seed(master, a));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return std::mt19937_64(derive_seed(master, a, b));
}

/// Unbiased draw in [0, n) by rejection. Hand-rolled so shuffles do not
/// depend on the standard library's distribution internals.
inline std::uint64_t bounded(std::mt19937_64& eng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

}  // namespace amcw::rng

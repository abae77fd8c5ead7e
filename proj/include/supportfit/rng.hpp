#pragma once

#include <cstdint>
#include <random>

namespace supportfit {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed split: the child stream depends only on (base, a, b),
/// never on the order in which children are requested.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0) {
  return mix64(mix64(mix64(base) ^ (a + 0x632be59bd9b4e019ULL)) ^
               (b + 0x85157af5ULL));
}

}  // namespace supportfit

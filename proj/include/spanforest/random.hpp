#pragma once

#include <cstdint>
#include <random>

namespace spanforest {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed-splitting scheme used for every derived stream:
/// derive_seed(seed, i) = mix64(mix64(seed) ^ mix64(i + 1)).
/// Streams for different indices are independent for practical purposes, so
/// runs can be evaluated in any order or in parallel.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 1));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng{derive_seed(seed, index)}; }

/// Uniform integer in [0, bound). bound must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
  return std::uniform_int_distribution<std::size_t>{0, bound - 1}(rng);
}

}  // namespace spanforest

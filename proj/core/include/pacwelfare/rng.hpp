#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pacwelfare {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable stream derivation: the same (master, keys...) always yields the same
// seed, independent of evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

inline std::uint64_t bits_of(double x) noexcept {
  // +0 and -0 must hash alike.
  return std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1).
inline double uniform_open01(Engine& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Engine& g) {
  std::normal_distribution<double> dist;
  return dist(g);
}

}  // namespace pacwelfare

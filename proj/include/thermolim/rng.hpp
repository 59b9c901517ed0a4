#pragma once

#include <cstdint>

namespace thermolim {

// All randomness in the library is counter-based: a value is a pure function
// of (seed, key), so colorings can be re-evaluated at any site in any order
// and parallel runs are byte-reproducible.

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combine a seed with one key (task index, site hash, ...).
inline constexpr std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t key) {
  return mix64(seed ^ mix64(key + kGamma));
}

// Fold another coordinate into a running key.
inline constexpr std::uint64_t foldKey(std::uint64_t h, std::int64_t c) {
  return mix64(h ^ (static_cast<std::uint64_t>(c) + kGamma));
}

// Uniform double in [0,1) with 53-bit resolution.
inline constexpr double toUnit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Sequential generator for Monte Carlo loops (SplitMix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_ += kGamma); }
  double uniform() { return toUnit(next()); }

  // Uniform integer in [0, n), n > 0. Modulo bias is irrelevant at our sizes.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace thermolim

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace qdict {

/// SplitMix64 finalizer. Used for seed derivation and keyed mixing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the seed of stream `index` from a root seed. Streams for
/// different indices are independent for all practical purposes; the
/// function is fixed so experiment outputs are reproducible.
constexpr std::uint64_t split_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return mix64(root + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Random source for every sampling routine in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Bounded draws use Lemire's multiply-shift rejection method
/// instead of std::uniform_int_distribution (whose algorithm is left to the
/// implementation), so identical seeds give identical structures on every
/// conforming toolchain.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return engine_(); }
  std::uint64_t next() { return engine_(); }

  /// Uniform value in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform k-bit value, k in [0, 64].
  std::uint64_t bits(unsigned k) {
    if (k == 0) return 0;
    const std::uint64_t v = next();
    return k >= 64 ? v : v >> (64 - k);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qdict

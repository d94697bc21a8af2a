// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "qdict/bits.hpp"
#include "qdict/rng.hpp"

namespace qdict {

/// x -> a*x + b over GF(2^k), a != 0. A 2-independent permutation of [2^k].
///
/// k = 0 is allowed and denotes the identity on the one-point domain {0}.
class AffinePerm {
 public:
  AffinePerm() = default;

  /// Samples a uniformly. Consumes one word for b, then one word per
  /// attempt at a nonzero a (expected 1/(1 - 2^-k) attempts).
  static AffinePerm sample(unsigned k, Rng& rng);
  static AffinePerm from_coefficients(unsigned k, std::uint64_t a, std::uint64_t b);
  static AffinePerm identity(unsigned k) { return from_coefficients(k, 1, 0); }

  std::uint64_t apply(std::uint64_t x) const noexcept;
  std::uint64_t invert(std::uint64_t y) const noexcept;

  unsigned bits() const noexcept { return k_; }
  std::uint64_t a() const noexcept { return a_; }
  std::uint64_t b() const noexcept { return b_; }
  bool is_identity() const noexcept { return a_ == 1 && b_ == 0; }

  /// a, b and the cached inverse of a, k bits each.
  std::uint64_t space_bits() const noexcept { return 3ull * k_; }
  void serialize(BitWriter& out) const;

 private:
  unsigned k_ = 0;
  std::uint64_t a_ = 1;
  std::uint64_t b_ = 0;
  std::uint64_t a_inv_ = 1;
};

/// Keyed per-row circular shift amounts in [columns].
class ShiftFamily {
 public:
  ShiftFamily() = default;
  ShiftFamily(std::uint64_t seed_lo, std::uint64_t seed_hi, unsigned column_bits, unsigned row_bits)
      : seed_lo_(seed_lo), seed_hi_(seed_hi), column_bits_(column_bits), row_bits_(row_bits) {}

  static ShiftFamily sample(unsigned column_bits, unsigned row_bits, Rng& rng);
  /// Every row shifted by zero.
  static ShiftFamily zero(unsigned column_bits, unsigned row_bits);

  std::uint64_t shift_of_row(std::uint64_t row) const noexcept {
    if (column_bits_ == 0 || is_zero_) return 0;
    std::uint64_t z = row * 0x9E3779B97F4A7C15ULL ^ seed_lo_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z ^= seed_hi_;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z >> (64 - column_bits_);
  }

  std::uint64_t columns() const noexcept { return std::uint64_t{1} << column_bits_; }
  unsigned column_bits() const noexcept { return column_bits_; }
  unsigned row_bits() const noexcept { return row_bits_; }

  std::uint64_t space_bits() const noexcept { return 128; }
  void serialize(BitWriter& out) const;

 private:
  std::uint64_t seed_lo_ = 0;
  std::uint64_t seed_hi_ = 0;
  unsigned column_bits_ = 0;
  unsigned row_bits_ = 0;
  bool is_zero_ = false;
};

/// Explicit random permutation of [s], s a power of two, with its inverse.
class StoredPerm {
 public:
  StoredPerm() = default;

  /// Fisher-Yates shuffle drawing Rng::below(i + 1) for i = s-1 down to 1.
  static StoredPerm sample(std::uint64_t size, Rng& rng);
  static StoredPerm identity(std::uint64_t size);
  static StoredPerm from_table(std::vector<std::uint32_t> forward);

  std::uint32_t apply(std::uint64_t i) const noexcept { return forward_[i]; }
  std::uint32_t invert(std::uint64_t j) const noexcept { return inverse_[j]; }
  std::uint64_t size() const noexcept { return forward_.size(); }
  const std::vector<std::uint32_t>& forward() const noexcept { return forward_; }

  /// Forward and inverse tables, lg s bits per entry each.
  std::uint64_t space_bits() const noexcept { return 2ull * size() * ceil_log2(size()); }
  void serialize(BitWriter& out) const;

 private:
  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> inverse_;
};

}  // namespace qdict

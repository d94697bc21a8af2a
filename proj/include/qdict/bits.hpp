// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qdict {

constexpr std::uint64_t low_mask(unsigned width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// ceil(lg x) for x >= 1; 0 for x <= 1.
constexpr unsigned ceil_log2(std::uint64_t x) noexcept {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

/// floor(lg x) for x >= 1.
constexpr unsigned floor_log2(std::uint64_t x) noexcept {
  return x == 0 ? 0u : static_cast<unsigned>(std::bit_width(x) - 1);
}

/// Bits needed to write any value in [0, count): ceil(lg count), at least 1
/// when count > 1 and 0 when the range is a single value.
constexpr unsigned width_for(std::uint64_t count) noexcept { return ceil_log2(count); }

constexpr std::uint64_t next_pow2(std::uint64_t x) noexcept {
  return x <= 1 ? 1 : std::uint64_t{1} << ceil_log2(x);
}

/// Fixed-width packed integer array. Widths 0..64.
class PackedArray {
 public:
  PackedArray() = default;
  PackedArray(std::size_t count, unsigned width)
      : count_(count), width_(width), words_((count * width + 63) / 64, 0) {}

  std::size_t size() const noexcept { return count_; }
  unsigned width() const noexcept { return width_; }
  std::uint64_t bit_size() const noexcept { return std::uint64_t{count_} * width_; }

  std::uint64_t get(std::size_t i) const noexcept {
    assert(i < count_);
    if (width_ == 0) return 0;
    const std::uint64_t bit = std::uint64_t{i} * width_;
    const std::size_t w = bit / 64;
    const unsigned off = bit % 64;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return v & low_mask(width_);
  }

  void set(std::size_t i, std::uint64_t value) noexcept {
    assert(i < count_);
    if (width_ == 0) return;
    value &= low_mask(width_);
    const std::uint64_t bit = std::uint64_t{i} * width_;
    const std::size_t w = bit / 64;
    const unsigned off = bit % 64;
    words_[w] = (words_[w] & ~(low_mask(width_) << off)) | (value << off);
    if (off + width_ > 64) {
      const unsigned spill = off + width_ - 64;
      words_[w + 1] = (words_[w + 1] & ~low_mask(spill)) | (value >> (64 - off));
    }
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  std::size_t count_ = 0;
  unsigned width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Append-only bit stream used to produce the flat serialized layout of a
/// structure. The serialized size is an independent check on the declared
/// space ledger.
class BitWriter {
 public:
  void put(std::uint64_t value, unsigned width) {
    if (width == 0) return;
    value &= low_mask(width);
    const unsigned off = bits_ % 64;
    if (off == 0) words_.push_back(0);
    words_.back() |= value << off;
    if (off + width > 64) words_.push_back(value >> (64 - off));
    bits_ += width;
  }

  std::uint64_t bit_size() const noexcept { return bits_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t bits_ = 0;
};

}  // namespace qdict

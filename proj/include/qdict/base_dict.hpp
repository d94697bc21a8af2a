// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qdict/bits.hpp"
#include "qdict/rng.hpp"
#include "qdict/space.hpp"

namespace qdict {

/// Fixed-capacity exact map from key_bits-bit keys to value_bits-bit values.
///
/// Two tables of 4-slot buckets (two hash choices per key) sized for load
/// <= 1/2 at full capacity, plus an 8-entry stash. Lookups probe at most
/// 2*4 + 8 slots. Inserts run a bounded random-walk displacement; when the
/// walk and the stash both fail the walk is undone and, depending on the
/// policy, the table is reseeded and rebuilt or the failure is returned.
class BaseDict {
 public:
  static constexpr unsigned kSlotsPerBucket = 4;
  static constexpr unsigned kStashSize = 8;
  static constexpr unsigned kMaxKicks = 64;
  static constexpr unsigned kMaxProbes = 2 * kSlotsPerBucket + kStashSize;
  static constexpr std::uint64_t kSeedBits = 128;
  static constexpr std::uint64_t kCounterBits = 64;

  enum class Policy : std::uint8_t { kRebuild, kNoRebuild };
  enum class InsertOutcome : std::uint8_t { kInserted, kReplaced, kRebuiltThenInserted, kFailed };
  enum class DeleteOutcome : std::uint8_t { kDeleted, kAbsent };

  BaseDict() = default;
  BaseDict(unsigned key_bits, unsigned value_bits, std::uint64_t capacity, Rng& rng,
           Policy policy = Policy::kRebuild);

  /// Throws DictError(kOutOfDomain) for oversized keys or values and
  /// DictError(kCapacityExceeded) when inserting a new key at capacity.
  InsertOutcome insert(std::uint64_t key, std::uint64_t value);
  DeleteOutcome erase(std::uint64_t key);
  std::optional<std::uint64_t> lookup(std::uint64_t key) const noexcept;
  bool contains(std::uint64_t key) const noexcept { return find(key) != kNone; }

  /// Slots read by a lookup of `key`; never exceeds kMaxProbes.
  unsigned probe_count(std::uint64_t key) const noexcept;

  std::uint64_t size() const noexcept { return occupancy_; }
  std::uint64_t capacity() const noexcept { return capacity_; }
  std::uint64_t rebuild_count() const noexcept { return rebuilds_; }
  unsigned key_bits() const noexcept { return key_bits_; }
  unsigned value_bits() const noexcept { return value_bits_; }
  std::uint64_t slot_count() const noexcept { return keys_.size(); }
  std::uint64_t buckets_per_table() const noexcept { return buckets_; }
  std::uint64_t stash_size() const noexcept;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (used_[i]) fn(keys_[i], values_[i]);
    }
  }

  /// slots + stash entries of (1 + key_bits + value_bits) bits each, the two
  /// hash seeds and the occupancy/rebuild counters.
  static std::uint64_t layout_bits(unsigned key_bits, unsigned value_bits, std::uint64_t capacity);
  SpaceLedger space() const;
  std::uint64_t space_bits() const { return space().total(); }
  void serialize(BitWriter& out) const;

 private:
  static constexpr std::size_t kNone = ~std::size_t{0};

  std::size_t bucket_start(unsigned table, std::uint64_t key) const noexcept;
  std::size_t find(std::uint64_t key) const noexcept;
  std::size_t free_slot_in(std::size_t start) const noexcept;
  bool place(std::uint64_t key, std::uint64_t value);
  void reseed();
  void rebuild_with(std::uint64_t key, std::uint64_t value);
  std::uint64_t next_walk() noexcept;

  unsigned key_bits_ = 0;
  unsigned value_bits_ = 0;
  std::uint64_t capacity_ = 0;
  std::uint64_t buckets_ = 0;  // per table
  Policy policy_ = Policy::kRebuild;
  std::uint64_t base_seed_ = 0;
  std::uint64_t seeds_[2] = {0, 0};
  std::uint64_t generation_ = 0;
  std::uint64_t walk_state_ = 0;
  std::uint64_t occupancy_ = 0;
  std::uint64_t rebuilds_ = 0;
  // Slot arrays: table 0 buckets, table 1 buckets, then the stash.
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint8_t> used_;
};

/// Hands out codes in [m]: most recently freed first, otherwise the least
/// never-used code.
class CodeAllocator {
 public:
  CodeAllocator() = default;
  explicit CodeAllocator(std::uint64_t range);

  /// Throws DictError(kAllocatorExhausted) when all m codes are live.
  std::uint64_t alloc();
  /// Throws DictError(kDoubleFree) unless `code` is currently allocated.
  void free(std::uint64_t code);
  bool is_allocated(std::uint64_t code) const noexcept {
    return code < range_ && allocated_[code];
  }

  std::uint64_t range() const noexcept { return range_; }
  std::uint64_t allocated() const noexcept { return allocated_count_; }
  std::uint64_t available() const noexcept { return range_ - allocated_count_; }

  /// Free stack (m entries of lg m bits), allocation bitmap, two counters.
  static std::uint64_t layout_bits(std::uint64_t range);
  SpaceLedger space() const;
  std::uint64_t space_bits() const { return layout_bits(range_); }
  void serialize(BitWriter& out) const;

 private:
  std::uint64_t range_ = 0;
  std::uint64_t next_unused_ = 0;
  std::uint64_t allocated_count_ = 0;
  std::vector<std::uint64_t> free_stack_;
  std::vector<bool> allocated_;
};

}  // namespace qdict

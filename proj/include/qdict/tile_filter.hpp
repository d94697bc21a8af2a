// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdict/bits.hpp"
#include "qdict/perm_core.hpp"

namespace qdict {

/// Shape shared by every tile-filter bucket of one structure.
///
/// Level i splits the bucket universe [v] into m_i tiles (m_i a power of
/// two, halving from level to level), one slot per tile. A slot stores the
/// within-tile index of one value, lg(v / m_i) bits, plus an occupied flag.
struct TileLayout {
  unsigned universe_bits = 0;             // lg v
  std::vector<unsigned> tile_bits;        // lg m_i per level
  std::vector<std::uint64_t> code_offset; // first code of each level
  std::uint64_t codes = 0;                // sum of m_i

  /// levels = max(1, floor(lg lg n / 8)); m_i = next power of two >= c4 (lg n)^{1/4} / 2^i,
  /// clamped to [1, v].
  static TileLayout make(unsigned universe_bits, std::uint64_t n, double c4);
  static TileLayout from_tile_bits(unsigned universe_bits, std::vector<unsigned> tile_bits);

  unsigned levels() const noexcept { return static_cast<unsigned>(tile_bits.size()); }
  std::uint64_t tiles(unsigned level) const noexcept { return std::uint64_t{1} << tile_bits[level]; }
  unsigned index_bits(unsigned level) const noexcept { return universe_bits - tile_bits[level]; }
  std::uint64_t bucket_bits() const noexcept;
};

struct TilePosition {
  unsigned level = 0;
  std::uint64_t tile = 0;
  friend bool operator==(const TilePosition&, const TilePosition&) = default;
};

/// One bucket of tile filters. Level i sends value q to tile
/// perm_i(q) >> index_bits(i); the slot keeps perm_i(q)'s low bits. As
/// perm_i is a bijection, (level, tile, stored index) identifies q exactly,
/// so queries have no false positives.
class TileFilterBucket {
 public:
  TileFilterBucket(const TileLayout& layout, std::span<const StoredPerm> perms);

  /// First level whose tile is empty, or nullopt if every level conflicts.
  /// Throws DictError(kDuplicateKey) if q is already stored.
  std::optional<TilePosition> insert(std::uint64_t q);
  std::optional<TilePosition> query(std::uint64_t q) const noexcept;
  /// Throws DictError(kNotResident) if q is not stored.
  void erase(std::uint64_t q);

  std::uint64_t code_of(TilePosition pos) const noexcept {
    return layout_->code_offset[pos.level] + pos.tile;
  }
  std::uint64_t resident_count() const noexcept { return residents_; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (unsigned i = 0; i < layout_->levels(); ++i) {
      for (std::uint64_t tile = 0; tile < layout_->tiles(i); ++tile) {
        const std::uint32_t slot = slots_[layout_->code_offset[i] + tile];
        if (slot == 0) continue;
        const std::uint64_t permuted = (tile << layout_->index_bits(i)) | (slot - 1);
        fn(std::uint64_t{perms_[i].invert(permuted)}, TilePosition{i, tile});
      }
    }
  }

  void serialize(BitWriter& out) const;

 private:
  std::uint32_t& slot(unsigned level, std::uint64_t tile) { return slots_[layout_->code_offset[level] + tile]; }

  const TileLayout* layout_;
  std::span<const StoredPerm> perms_;
  std::vector<std::uint32_t> slots_;  // 0 = empty, else within-tile index + 1
  std::uint64_t residents_ = 0;
};

}  // namespace qdict

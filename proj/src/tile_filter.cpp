// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/tile_filter.hpp"

#include <algorithm>
#include <cmath>

#include "qdict/error.hpp"

namespace qdict {

TileLayout TileLayout::make(unsigned universe_bits, std::uint64_t n, double c4) {
  const double lg_n = std::max(1.0, std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2))));
  const unsigned levels = std::max(1u, static_cast<unsigned>(std::floor(std::log2(lg_n) / 8.0)));
  const double base = c4 * std::pow(lg_n, 0.25);
  std::vector<unsigned> bits;
  for (unsigned i = 0; i < levels; ++i) {
    const double want = std::ceil(base / std::ldexp(1.0, static_cast<int>(i)));
    unsigned lg = ceil_log2(static_cast<std::uint64_t>(std::max(1.0, want)));
    bits.push_back(std::min(lg, universe_bits));
  }
  return from_tile_bits(universe_bits, std::move(bits));
}

TileLayout TileLayout::from_tile_bits(unsigned universe_bits, std::vector<unsigned> tile_bits) {
  if (tile_bits.empty()) throw DictError(Errc::kInvalidParams, "tile layout needs at least one level");
  if (universe_bits > 31) throw DictError(Errc::kInvalidParams, "tile bucket universe too large");
  TileLayout layout;
  layout.universe_bits = universe_bits;
  layout.tile_bits = std::move(tile_bits);
  for (unsigned b : layout.tile_bits) {
    if (b > universe_bits) throw DictError(Errc::kInvalidParams, "more tiles than bucket universe");
    layout.code_offset.push_back(layout.codes);
    layout.codes += std::uint64_t{1} << b;
  }
  return layout;
}

std::uint64_t TileLayout::bucket_bits() const noexcept {
  std::uint64_t bits = 0;
  for (unsigned i = 0; i < levels(); ++i) bits += tiles(i) * (1 + index_bits(i));
  return bits;
}

TileFilterBucket::TileFilterBucket(const TileLayout& layout, std::span<const StoredPerm> perms)
    : layout_(&layout), perms_(perms), slots_(layout.codes, 0) {
  if (perms.size() < layout.levels()) {
    throw DictError(Errc::kInvalidParams, "one permutation per tile level required");
  }
}

std::optional<TilePosition> TileFilterBucket::query(std::uint64_t q) const noexcept {
  for (unsigned i = 0; i < layout_->levels(); ++i) {
    const std::uint64_t p = perms_[i].apply(q);
    const unsigned ib = layout_->index_bits(i);
    const std::uint64_t tile = p >> ib;
    const std::uint32_t s = slots_[layout_->code_offset[i] + tile];
    if (s != 0 && s - 1 == (p & low_mask(ib))) return TilePosition{i, tile};
  }
  return std::nullopt;
}

std::optional<TilePosition> TileFilterBucket::insert(std::uint64_t q) {
  if (query(q)) throw DictError(Errc::kDuplicateKey, "value already in tile filter");
  for (unsigned i = 0; i < layout_->levels(); ++i) {
    const std::uint64_t p = perms_[i].apply(q);
    const unsigned ib = layout_->index_bits(i);
    const std::uint64_t tile = p >> ib;
    auto& s = slot(i, tile);
    if (s == 0) {
      s = static_cast<std::uint32_t>((p & low_mask(ib)) + 1);
      ++residents_;
      return TilePosition{i, tile};
    }
  }
  return std::nullopt;
}

void TileFilterBucket::erase(std::uint64_t q) {
  const auto pos = query(q);
  if (!pos) throw DictError(Errc::kNotResident, "value not in tile filter");
  slot(pos->level, pos->tile) = 0;
  --residents_;
}

void TileFilterBucket::serialize(BitWriter& out) const {
  for (unsigned i = 0; i < layout_->levels(); ++i) {
    const unsigned ib = layout_->index_bits(i);
    for (std::uint64_t tile = 0; tile < layout_->tiles(i); ++tile) {
      const std::uint32_t s = slots_[layout_->code_offset[i] + tile];
      out.put(s != 0, 1);
      out.put(s == 0 ? 0 : s - 1, ib);
    }
  }
}

}  // namespace qdict

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "qdict/error.hpp"
#include "qdict/tile_filter.hpp"

using namespace qdict;

namespace {

// Per-level map tile -> resident value.
struct NaiveTiles {
  const TileLayout& layout;
  const std::vector<StoredPerm>& perms;
  std::vector<std::map<std::uint64_t, std::uint64_t>> levels;

  NaiveTiles(const TileLayout& l, const std::vector<StoredPerm>& p) : layout(l), perms(p), levels(l.levels()) {}

  std::uint64_t tile(unsigned i, std::uint64_t q) const { return perms[i].apply(q) >> layout.index_bits(i); }

  std::optional<TilePosition> insert(std::uint64_t q) {
    for (unsigned i = 0; i < layout.levels(); ++i) {
      if (levels[i].emplace(tile(i, q), q).second) return TilePosition{i, tile(i, q)};
    }
    return std::nullopt;
  }
  std::optional<TilePosition> query(std::uint64_t q) const {
    for (unsigned i = 0; i < layout.levels(); ++i) {
      const auto it = levels[i].find(tile(i, q));
      if (it != levels[i].end() && it->second == q) return TilePosition{i, tile(i, q)};
    }
    return std::nullopt;
  }
  void erase(std::uint64_t q) { levels[query(q)->level].erase(query(q)->tile); }
};

std::vector<StoredPerm> sample_perms(const TileLayout& layout, Rng& rng) {
  std::vector<StoredPerm> perms;
  for (unsigned i = 0; i < layout.levels(); ++i) perms.push_back(StoredPerm::sample(1ull << layout.universe_bits, rng));
  return perms;
}

}  // namespace

TEST_CASE("layout from parameters") {
  const auto l = TileLayout::make(7, 4096, 4.0);
  CHECK(l.levels() == 1);
  CHECK(l.tiles(0) == 8);  // next power of two >= 4 * 12^(1/4)
  CHECK(l.codes == 8);
  CHECK(l.bucket_bits() == 8 * (1 + 4));
  const auto m = TileLayout::from_tile_bits(10, {4, 3, 2});
  CHECK(m.codes == 16 + 8 + 4);
  CHECK(m.code_offset == std::vector<std::uint64_t>{0, 16, 24});
  CHECK(m.bucket_bits() == 16 * 7 + 8 * 8 + 4 * 9);
  CHECK(m.codes <= 2 * 16);
}

TEST_CASE("insert and query basics") {
  Rng rng(1);
  const auto layout = TileLayout::from_tile_bits(10, {4, 3, 2});
  const auto perms = sample_perms(layout, rng);
  TileFilterBucket b(layout, perms);
  CHECK(!b.query(5));
  const auto pos = b.insert(5);
  REQUIRE(pos);
  CHECK(pos->level == 0);
  CHECK(b.query(5) == pos);
  CHECK_THROWS_AS(b.insert(5), DictError);
  CHECK_THROWS_AS(b.erase(6), DictError);
  // A value sharing 5's level-0 tile goes deeper or overflows.
  for (std::uint64_t q = 0; q < 1024; ++q) {
    if (q != 5 && (perms[0].apply(q) >> 6) == (perms[0].apply(5) >> 6)) {
      const auto p = b.insert(q);
      CHECK((!p || p->level >= 1));
      break;
    }
  }
}

TEST_CASE("random workloads match a naive per-level simulation") {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto layout = TileLayout::from_tile_bits(10, {4, 3, 2});
    const auto perms = sample_perms(layout, rng);
    TileFilterBucket b(layout, perms);
    NaiveTiles naive(layout, perms);
    std::set<std::uint64_t> resident;
    for (int op = 0; op < 2000; ++op) {
      const std::uint64_t q = rng.below(1024);
      if (resident.contains(q)) {
        if (rng.below(2)) {
          b.erase(q);
          naive.erase(q);
          resident.erase(q);
        }
      } else {
        const auto got = b.insert(q);
        REQUIRE(got == naive.insert(q));
        if (got) resident.insert(q);
      }
      const std::uint64_t probe = rng.below(1024);
      REQUIRE(b.query(probe) == naive.query(probe));
    }
    CHECK(b.resident_count() == resident.size());
    std::set<std::uint64_t> decoded, codes;
    b.for_each([&](std::uint64_t q, TilePosition pos) {
      decoded.insert(q);
      codes.insert(b.code_of(pos));
      CHECK(b.query(q) == pos);
    });
    CHECK(decoded == resident);
    CHECK(codes.size() == resident.size());
    for (auto c : codes) CHECK(c < layout.codes);
  }
}

TEST_CASE("exhaustive filling respects the tile count") {
  Rng rng(3);
  const auto layout = TileLayout::from_tile_bits(6, {3, 2, 1});
  const auto perms = sample_perms(layout, rng);
  TileFilterBucket b(layout, perms);
  NaiveTiles naive(layout, perms);
  for (std::uint64_t q = 0; q < 64; ++q) REQUIRE(b.insert(q) == naive.insert(q));
  CHECK(b.resident_count() == layout.codes);  // every tile of every level ends up filled
  BitWriter out;
  b.serialize(out);
  CHECK(out.bit_size() == layout.bucket_bits());
}

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qdict/base_dict.hpp"
#include "qdict/quotient_hash.hpp"
#include "qdict/rng.hpp"
#include "qdict/space.hpp"
#include "qdict/tile_filter.hpp"

namespace qdict {

using Hashcode = std::uint64_t;

struct MembPhTunables {
  double c1 = 0.25;  // level-2 bucket count factor, <= 1/3
  double c2 = 8.0;   // level-1 expected bucket load factor: mu = c2 (n/t)^3
  double c4 = 4.0;   // level-0 tile count factor: c4 (lg n)^{1/4}
  double c5 = 2.0;   // decay rate of the level-2 load analysis; not used by the layout
  double alpha = 0.95;
  double delta = 0.5;
};

struct MembPhParams {
  std::uint64_t n = 1;         // capacity
  std::uint64_t t = 0;         // hashcode slack; codes lie in [n + t]
  unsigned universe_bits = 1;  // u = 2^universe_bits
  MembPhTunables tunables{};

  /// min(t, max(1, floor(n^2 / u))): the slack the layout is sized for.
  std::uint64_t t_eff() const noexcept;
  std::uint64_t code_range() const noexcept { return n + t; }
  void validate() const;
};

/// Sizes chosen for one parameter set; fixed for the life of the structure.
struct MembPhPlan {
  enum class Mode : std::uint8_t { kBruteForce, kLayered };
  Mode mode = Mode::kBruteForce;
  std::uint64_t t_eff = 0;
  // level 1
  std::uint64_t mu = 0;
  unsigned level1_bucket_bits = 0;
  std::uint64_t level1_bucket_capacity = 0;
  std::uint64_t level1_budget = 0;  // codes [0, n + level1_budget)
  // level 2 (level2_buckets == 0 when absent)
  std::uint64_t level2_buckets = 0;
  unsigned level2_bucket_bits = 0;
  std::uint64_t level2_budget = 0;
  std::uint64_t level2_pools = 0;
  TileLayout level2_layout{};
  // level 3
  std::uint64_t level3_budget = 0;

  std::uint64_t level2_offset(std::uint64_t n) const noexcept { return n + level1_budget; }
  std::uint64_t level3_offset(std::uint64_t n) const noexcept { return n + level1_budget + level2_budget; }

  static constexpr unsigned kMaxTileUniverseBits = 20;
  static MembPhPlan make(const MembPhParams& params);
};

/// Dynamic set of at most n keys from [u] with exact membership and stable
/// hashcodes in [n + t].
///
/// Brute-force mode keeps key -> code in one BaseDict with a code free list
/// over [n]. Layered mode tries, in order:
///   level 1: quotient hash into b1 buckets, each a no-rebuild BaseDict from
///            quotient to a local code, codes [0, n + t/3);
///   level 2: quotient hash into b2 buckets of tile filters, codes in the
///            next t/3 block (present only for large enough t);
///   level 3: BaseDict from full key to code, codes in the last t/3 block.
/// A key stays at the level that accepted it until deleted. If level 3 is
/// full the whole structure is reseeded and rebuilt; that is the only event
/// that changes codes of resident keys and is counted by rebuilds().
class MembPhDict {
 public:
  using Mode = MembPhPlan::Mode;
  using RelabelObserver = std::function<void(std::span<const std::pair<Hashcode, Hashcode>>)>;
  static constexpr unsigned kMaxRebuildAttempts = 32;

  MembPhDict(const MembPhParams& params, Rng& rng);

  /// Throws kOutOfDomain, kDuplicateKey or kCapacityExceeded.
  Hashcode insert(Key x);
  /// Throws kNotResident.
  void erase(Key x);
  bool member(Key x) const noexcept { return find_code(x).has_value(); }
  /// Throws kNotResident.
  Hashcode hashcode(Key x) const;
  std::optional<Hashcode> find_code(Key x) const noexcept;
  /// 1, 2 or 3 for resident keys in layered mode, 0 in brute-force mode.
  std::optional<int> level_of(Key x) const noexcept;

  template <typename Fn>
  void for_each(Fn&& fn) const;
  std::vector<std::pair<Key, Hashcode>> residents() const;

  /// Called with (old code, new code) for every resident after a rebuild.
  void set_relabel_observer(RelabelObserver observer) { observer_ = std::move(observer); }

  const MembPhParams& params() const noexcept { return params_; }
  const MembPhPlan& plan() const noexcept { return plan_; }
  Mode mode() const noexcept { return plan_.mode; }
  std::uint64_t size() const noexcept { return live_; }
  std::uint64_t rebuilds() const noexcept { return rebuilds_; }
  std::uint64_t level_count(int level) const noexcept;
  /// Sum of rebuild_count() over the level-1 bucket dictionaries.
  std::uint64_t level1_dict_rebuilds() const noexcept;
  const QuotientHashFn& level1_hash() const noexcept { return layers_.qhf1; }

  SpaceLedger space() const;
  std::uint64_t space_bits() const { return space().total(); }
  void serialize(BitWriter& out) const;

 private:
  struct Layers {
    // brute force
    BaseDict brute;
    CodeAllocator brute_codes;
    // level 1
    QuotientHashFn qhf1;
    std::vector<BaseDict> dicts1;
    std::vector<CodeAllocator> codes1;
    // level 2
    QuotientHashFn qhf2;
    std::shared_ptr<const TileLayout> layout2;
    std::shared_ptr<const std::vector<std::vector<StoredPerm>>> pools2;
    std::vector<TileFilterBucket> tiles2;
    // level 3
    BaseDict dict3;
    CodeAllocator codes3;
    std::uint64_t counts[4] = {0, 0, 0, 0};
  };

  Layers sample_layers();
  std::optional<Hashcode> try_insert(Layers& layers, Key x) const;
  Hashcode rebuild_with(Key x);
  template <typename Fn>
  static void visit(const Layers& layers, const MembPhParams& params, const MembPhPlan& plan, Fn&& fn);

  MembPhParams params_;
  MembPhPlan plan_;
  Rng rng_;
  Layers layers_;
  std::uint64_t live_ = 0;
  std::uint64_t rebuilds_ = 0;
  RelabelObserver observer_;
};

template <typename Fn>
void MembPhDict::visit(const Layers& layers, const MembPhParams& params, const MembPhPlan& plan, Fn&& fn) {
  if (plan.mode == Mode::kBruteForce) {
    layers.brute.for_each([&](std::uint64_t key, std::uint64_t code) { fn(Key{key}, Hashcode{code}); });
    return;
  }
  const std::uint64_t cap1 = plan.level1_bucket_capacity;
  for (std::uint64_t b = 0; b < layers.dicts1.size(); ++b) {
    layers.dicts1[b].for_each([&](std::uint64_t quotient, std::uint64_t local) {
      fn(layers.qhf1.invert(b, quotient), Hashcode{b * cap1 + local});
    });
  }
  const std::uint64_t off2 = plan.level2_offset(params.n);
  for (std::uint64_t b = 0; b < layers.tiles2.size(); ++b) {
    const auto& bucket = layers.tiles2[b];
    bucket.for_each([&](std::uint64_t q, TilePosition pos) {
      fn(layers.qhf2.invert(b, q), Hashcode{off2 + b * plan.level2_layout.codes + bucket.code_of(pos)});
    });
  }
  const std::uint64_t off3 = plan.level3_offset(params.n);
  layers.dict3.for_each([&](std::uint64_t key, std::uint64_t code) { fn(Key{key}, Hashcode{off3 + code}); });
}

template <typename Fn>
void MembPhDict::for_each(Fn&& fn) const {
  visit(layers_, params_, plan_, std::forward<Fn>(fn));
}

}  // namespace qdict

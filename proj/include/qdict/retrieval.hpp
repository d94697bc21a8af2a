// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qdict/bits.hpp"
#include "qdict/error.hpp"
#include "qdict/memb_ph_dict.hpp"
#include "qdict/ph_dict.hpp"

namespace qdict {

/// (n + t) cells of r bits each, indexed by hashcode.
class PayloadStore {
 public:
  static constexpr unsigned kMaxWidth = 64;

  PayloadStore(std::uint64_t slots, unsigned r) : r_(r), cells_(slots, r) {
    if (r > kMaxWidth) throw DictError(Errc::kInvalidParams, "payload width > 64");
  }

  unsigned width() const noexcept { return r_; }
  std::uint64_t slots() const noexcept { return cells_.size(); }

  std::uint64_t read(Hashcode slot) const {
    check(slot);
    return cells_.get(slot);
  }
  void write(Hashcode slot, std::uint64_t payload) {
    check(slot);
    if (payload > low_mask(r_)) {
      throw DictError(Errc::kOutOfDomain, "payload wider than " + std::to_string(r_) + " bits");
    }
    cells_.set(slot, payload);
  }
  /// Moves payloads along (old, new) pairs; all reads happen before writes.
  void relocate(std::span<const std::pair<Hashcode, Hashcode>> moves) {
    std::vector<std::uint64_t> saved;
    saved.reserve(moves.size());
    for (const auto& m : moves) saved.push_back(read(m.first));
    for (std::size_t i = 0; i < moves.size(); ++i) cells_.set(moves[i].second, saved[i]);
  }

  std::uint64_t space_bits() const noexcept { return cells_.bit_size(); }
  void serialize(BitWriter& out) const {
    for (std::uint64_t i = 0; i < cells_.size(); ++i) out.put(cells_.get(i), r_);
  }

 private:
  void check(Hashcode slot) const {
    if (slot >= cells_.size()) throw DictError(Errc::kOutOfDomain, "slot outside [n + t]");
  }

  unsigned r_;
  PackedArray cells_;
};

/// Key -> r-bit payload map built on a stable perfect-hashing engine.
/// Engine is MembPhDict (non-residents rejected) or PhOnlyDict (undefined
/// result for non-residents). Not movable: the engine observer refers back
/// to this object.
template <typename Engine>
class RetrievalDict {
 public:
  static constexpr bool kHasMembership = std::is_same_v<Engine, MembPhDict>;
  using Params = std::conditional_t<kHasMembership, MembPhParams, PhOnlyParams>;

  RetrievalDict(const Params& params, unsigned r, Rng& rng)
      : engine_(params, rng), store_(params.n + params.t, r) {
    engine_.set_relabel_observer([this](std::span<const std::pair<Hashcode, Hashcode>> moves) {
      store_.relocate(moves);
      if (observer_) observer_(moves);
    });
  }
  RetrievalDict(const RetrievalDict&) = delete;
  RetrievalDict& operator=(const RetrievalDict&) = delete;

  /// Validates the payload before touching the engine.
  Hashcode insert(Key x, std::uint64_t payload) {
    if (payload > low_mask(store_.width())) {
      throw DictError(Errc::kOutOfDomain, "payload wider than " + std::to_string(store_.width()) + " bits");
    }
    const Hashcode code = engine_.insert(x);
    store_.write(code, payload);
    return code;
  }

  std::uint64_t retrieve(Key x) const { return store_.read(slot_of(x)); }

  void update(Key x, std::uint64_t payload) { store_.write(slot_of(x), payload); }

  void erase(Key x) { engine_.erase(x); }

  /// Only for the ph-only engine after kRebuildRequired; payloads follow
  /// their keys.
  void rebuild(std::span<const Key> residents)
    requires(!kHasMembership)
  {
    engine_.rebuild(residents);
  }

  /// Notified after payloads have followed a code change.
  void set_relabel_observer(MembPhDict::RelabelObserver observer) { observer_ = std::move(observer); }

  Engine& engine() noexcept { return engine_; }
  const Engine& engine() const noexcept { return engine_; }
  const PayloadStore& store() const noexcept { return store_; }

  SpaceLedger space() const {
    SpaceLedger ledger;
    ledger.merge("engine", engine_.space());
    ledger.add("payloads", store_.space_bits());
    return ledger;
  }
  void serialize(BitWriter& out) const {
    engine_.serialize(out);
    store_.serialize(out);
  }

 private:
  Hashcode slot_of(Key x) const {
    // Throws kNotResident for the membership engine; any in-range slot
    // for the ph-only engine.
    return engine_.hashcode(x);
  }

  Engine engine_;
  PayloadStore store_;
  MembPhDict::RelabelObserver observer_;
};

using MembRetrieval = RetrievalDict<MembPhDict>;
using PhRetrieval = RetrievalDict<PhOnlyDict>;

}  // namespace qdict

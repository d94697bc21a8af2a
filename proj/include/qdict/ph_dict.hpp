// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>

#include "qdict/memb_ph_dict.hpp"

namespace qdict {

struct PhOnlyParams {
  std::uint64_t n = 1;
  std::uint64_t t = 0;
  unsigned universe_bits = 1;
  double c = 8.0;  // bucket count b = c n^2 / (t + 1), rounded up to a power of two
  MembPhTunables tunables{};

  void validate() const;
};

/// Stable perfect hashing into [n + t] without membership.
///
/// Composed mode: a quotient hash sends keys to b >= n buckets. `first`
/// (membership + perfect hashing over bucket ids, codes [n + t/2]) holds
/// every occupied bucket; a key whose bucket was already occupied at its
/// insertion goes to `second` (over full keys, capacity t/4, codes offset
/// by n + t/2). The bucket entry stands for whichever key claimed it.
///
/// Relabel mode (t <= 2^ceil(lg sqrt n)): an inner composed structure with
/// t = n, whose codes in [2n] are mapped through a table to [n].
///
/// Queries on non-resident keys have no guaranteed result.
class PhOnlyDict {
 public:
  enum class Mode : std::uint8_t { kComposed, kRelabel };
  using RelabelObserver = MembPhDict::RelabelObserver;
  static constexpr unsigned kMaxRebuildAttempts = 32;

  PhOnlyDict(const PhOnlyParams& params, Rng& rng);
  PhOnlyDict(const PhOnlyDict&) = delete;
  PhOnlyDict& operator=(const PhOnlyDict&) = delete;

  /// Throws kOutOfDomain, kCapacityExceeded, kDuplicateKey (only detected
  /// for keys held by `second`), or kRebuildRequired when `second` is full.
  /// After kRebuildRequired the structure is unchanged; the caller calls
  /// rebuild() with the resident keys and retries.
  Hashcode insert(Key x);
  /// Checks `second` first, then removes the key's bucket from `first`.
  /// Throws kNotResident when neither holds an entry for x.
  void erase(Key x);
  /// Stable code of a resident key. For other keys some value in [n + t];
  /// the state is not modified either way.
  Hashcode hashcode(Key x) const noexcept { return find_code(x).value_or(0); }
  /// The code of the entry that answers for x, or nullopt if none does. A
  /// value does not imply that x is resident.
  std::optional<Hashcode> find_code(Key x) const noexcept;

  /// Resamples the hash function and substructures and reinserts `keys`,
  /// which must be exactly the resident set. In composed mode codes may
  /// change and are reported to the relabel observer; in relabel mode the
  /// external codes are kept.
  void rebuild(std::span<const Key> keys);

  /// Called with (old, new) code pairs when a substructure rebuild moves
  /// codes of resident keys.
  void set_relabel_observer(RelabelObserver observer) { observer_ = std::move(observer); }

  const PhOnlyParams& params() const noexcept { return params_; }
  Mode mode() const noexcept { return mode_; }
  std::uint64_t code_range() const noexcept { return params_.n + params_.t; }
  std::uint64_t size() const noexcept { return live_; }
  std::uint64_t overflow_rebuilds() const noexcept;
  /// Substructure rebuilds (level-3 exhaustion inside `first`/`second`).
  std::uint64_t inner_rebuilds() const noexcept;
  /// Insertions routed to `second` since construction or the last rebuild().
  std::uint64_t second_routed() const noexcept;
  std::uint64_t second_offset() const noexcept { return params_.n + params_.t / 2; }
  unsigned bucket_bits() const noexcept { return bucket_bits_; }
  const QuotientHashFn* hash() const noexcept { return qhf_ ? &*qhf_ : nullptr; }
  const MembPhDict* first() const noexcept { return first_.get(); }
  const MembPhDict* second() const noexcept { return second_.get(); }
  const PhOnlyDict* inner() const noexcept { return inner_.get(); }

  SpaceLedger space() const;
  std::uint64_t space_bits() const { return space().total(); }
  void serialize(BitWriter& out) const;

  /// Bucket count exponent used by composed mode for these parameters.
  static unsigned bucket_bits_for(const PhOnlyParams& params);
  static bool uses_relabel(const PhOnlyParams& params);

 private:
  struct ComposedTag {};
  PhOnlyDict(const PhOnlyParams& params, Rng& rng, ComposedTag);
  void build_composed();
  void build_relabel();
  void wire_observers();
  void forward(std::span<const std::pair<Hashcode, Hashcode>> pairs, std::uint64_t offset);

  PhOnlyParams params_;
  Mode mode_;
  Rng rng_;
  std::uint64_t live_ = 0;
  std::uint64_t overflow_rebuilds_ = 0;
  std::uint64_t second_routed_ = 0;
  RelabelObserver observer_;
  // composed
  unsigned bucket_bits_ = 0;
  std::optional<QuotientHashFn> qhf_;
  std::unique_ptr<MembPhDict> first_;
  std::unique_ptr<MembPhDict> second_;
  // relabel
  std::unique_ptr<PhOnlyDict> inner_;
  PackedArray relabel_;  // inner code -> external code + 1, 0 when unused
  CodeAllocator external_;
};

}  // namespace qdict

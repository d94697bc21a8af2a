// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/base_dict.hpp"

#include <string>
#include <tuple>
#include <utility>

#include "qdict/error.hpp"

namespace qdict {
namespace {

std::uint64_t fastrange(std::uint64_t hash, std::uint64_t range) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(hash) * range) >> 64);
}

std::uint64_t buckets_for(std::uint64_t capacity) noexcept {
  const std::uint64_t b = (capacity + BaseDict::kSlotsPerBucket - 1) / BaseDict::kSlotsPerBucket;
  return b == 0 ? 1 : b;
}

}  // namespace

BaseDict::BaseDict(unsigned key_bits, unsigned value_bits, std::uint64_t capacity, Rng& rng,
                   Policy policy)
    : key_bits_(key_bits),
      value_bits_(value_bits),
      capacity_(capacity),
      buckets_(buckets_for(capacity)),
      policy_(policy),
      base_seed_(rng.next()) {
  if (capacity == 0) throw DictError(Errc::kInvalidParams, "capacity must be >= 1");
  if (key_bits > 64 || value_bits > 64) throw DictError(Errc::kInvalidParams, "field width > 64");
  const std::size_t slots = 2 * buckets_ * kSlotsPerBucket + kStashSize;
  keys_.assign(slots, 0);
  values_.assign(slots, 0);
  used_.assign(slots, 0);
  walk_state_ = mix64(base_seed_ ^ 0x5851F42D4C957F2DULL);
  reseed();
}

void BaseDict::reseed() {
  seeds_[0] = split_seed(base_seed_, 2 * generation_);
  seeds_[1] = split_seed(base_seed_, 2 * generation_ + 1);
}

std::uint64_t BaseDict::next_walk() noexcept {
  walk_state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(walk_state_);
}

std::size_t BaseDict::bucket_start(unsigned table, std::uint64_t key) const noexcept {
  const std::uint64_t bucket = fastrange(mix64(key ^ seeds_[table]), buckets_);
  return (table * buckets_ + bucket) * kSlotsPerBucket;
}

std::size_t BaseDict::find(std::uint64_t key) const noexcept {
  for (unsigned t = 0; t < 2; ++t) {
    const std::size_t start = bucket_start(t, key);
    for (unsigned s = 0; s < kSlotsPerBucket; ++s) {
      if (used_[start + s] && keys_[start + s] == key) return start + s;
    }
  }
  const std::size_t stash = 2 * buckets_ * kSlotsPerBucket;
  for (unsigned s = 0; s < kStashSize; ++s) {
    if (used_[stash + s] && keys_[stash + s] == key) return stash + s;
  }
  return kNone;
}

unsigned BaseDict::probe_count(std::uint64_t key) const noexcept {
  unsigned probes = 0;
  for (unsigned t = 0; t < 2; ++t) {
    const std::size_t start = bucket_start(t, key);
    for (unsigned s = 0; s < kSlotsPerBucket; ++s) {
      ++probes;
      if (used_[start + s] && keys_[start + s] == key) return probes;
    }
  }
  return probes + kStashSize;
}

std::uint64_t BaseDict::stash_size() const noexcept {
  const std::size_t stash = 2 * buckets_ * kSlotsPerBucket;
  std::uint64_t count = 0;
  for (unsigned s = 0; s < kStashSize; ++s) count += used_[stash + s];
  return count;
}

std::optional<std::uint64_t> BaseDict::lookup(std::uint64_t key) const noexcept {
  const std::size_t at = find(key);
  if (at == kNone) return std::nullopt;
  return values_[at];
}

std::size_t BaseDict::free_slot_in(std::size_t start) const noexcept {
  for (unsigned s = 0; s < kSlotsPerBucket; ++s) {
    if (!used_[start + s]) return start + s;
  }
  return kNone;
}

bool BaseDict::place(std::uint64_t key, std::uint64_t value) {
  for (unsigned t = 0; t < 2; ++t) {
    const std::size_t at = free_slot_in(bucket_start(t, key));
    if (at != kNone) {
      keys_[at] = key;
      values_[at] = value;
      used_[at] = 1;
      return true;
    }
  }

  // Random walk; every eviction is logged so a failed walk can be undone.
  std::vector<std::tuple<std::size_t, std::uint64_t, std::uint64_t>> undo;
  std::uint64_t cur_key = key;
  std::uint64_t cur_value = value;
  unsigned table = next_walk() & 1;
  for (unsigned kick = 0; kick < kMaxKicks; ++kick) {
    const std::size_t at = bucket_start(table, cur_key) + next_walk() % kSlotsPerBucket;
    undo.emplace_back(at, keys_[at], values_[at]);
    std::swap(cur_key, keys_[at]);
    std::swap(cur_value, values_[at]);
    table ^= 1;
    const std::size_t free_at = free_slot_in(bucket_start(table, cur_key));
    if (free_at != kNone) {
      keys_[free_at] = cur_key;
      values_[free_at] = cur_value;
      used_[free_at] = 1;
      return true;
    }
  }
  const std::size_t stash = 2 * buckets_ * kSlotsPerBucket;
  for (unsigned s = 0; s < kStashSize; ++s) {
    if (!used_[stash + s]) {
      keys_[stash + s] = cur_key;
      values_[stash + s] = cur_value;
      used_[stash + s] = 1;
      return true;
    }
  }
  for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
    const auto& [at, k, v] = *it;
    keys_[at] = k;
    values_[at] = v;
  }
  return false;
}

void BaseDict::rebuild_with(std::uint64_t key, std::uint64_t value) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;
  entries.reserve(occupancy_ + 1);
  for_each([&](std::uint64_t k, std::uint64_t v) { entries.emplace_back(k, v); });
  entries.emplace_back(key, value);
  for (;;) {
    ++generation_;
    reseed();
    std::fill(used_.begin(), used_.end(), 0);
    bool ok = true;
    for (const auto& [k, v] : entries) {
      if (!place(k, v)) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  ++rebuilds_;
}

BaseDict::InsertOutcome BaseDict::insert(std::uint64_t key, std::uint64_t value) {
  if (key > low_mask(key_bits_)) throw DictError(Errc::kOutOfDomain, "key wider than key_bits");
  if (value > low_mask(value_bits_)) throw DictError(Errc::kOutOfDomain, "value wider than value_bits");
  const std::size_t at = find(key);
  if (at != kNone) {
    values_[at] = value;
    return InsertOutcome::kReplaced;
  }
  if (occupancy_ >= capacity_) {
    throw DictError(Errc::kCapacityExceeded, "base dictionary full at " + std::to_string(capacity_));
  }
  if (place(key, value)) {
    ++occupancy_;
    return InsertOutcome::kInserted;
  }
  if (policy_ == Policy::kNoRebuild) return InsertOutcome::kFailed;
  rebuild_with(key, value);
  ++occupancy_;
  return InsertOutcome::kRebuiltThenInserted;
}

BaseDict::DeleteOutcome BaseDict::erase(std::uint64_t key) {
  const std::size_t at = find(key);
  if (at == kNone) return DeleteOutcome::kAbsent;
  used_[at] = 0;
  --occupancy_;
  return DeleteOutcome::kDeleted;
}

std::uint64_t BaseDict::layout_bits(unsigned key_bits, unsigned value_bits, std::uint64_t capacity) {
  const std::uint64_t entry = 1ull + key_bits + value_bits;
  const std::uint64_t slots = 2 * buckets_for(capacity) * kSlotsPerBucket;
  return (slots + kStashSize) * entry + kSeedBits + kCounterBits;
}

SpaceLedger BaseDict::space() const {
  const std::uint64_t entry = 1ull + key_bits_ + value_bits_;
  SpaceLedger ledger;
  ledger.add("slots", 2 * buckets_ * kSlotsPerBucket * entry);
  ledger.add("stash", kStashSize * entry);
  ledger.add("seeds", kSeedBits);
  ledger.add("counters", kCounterBits);
  return ledger;
}

void BaseDict::serialize(BitWriter& out) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    out.put(used_[i], 1);
    out.put(used_[i] ? keys_[i] : 0, key_bits_);
    out.put(used_[i] ? values_[i] : 0, value_bits_);
  }
  out.put(base_seed_, 64);
  out.put(generation_, 64);
  out.put(occupancy_, 32);
  out.put(rebuilds_, 32);
}

CodeAllocator::CodeAllocator(std::uint64_t range) : range_(range), allocated_(range, false) {
  free_stack_.reserve(range);
}

std::uint64_t CodeAllocator::alloc() {
  std::uint64_t code;
  if (!free_stack_.empty()) {
    code = free_stack_.back();
    free_stack_.pop_back();
  } else if (next_unused_ < range_) {
    code = next_unused_++;
  } else {
    throw DictError(Errc::kAllocatorExhausted, "all " + std::to_string(range_) + " codes in use");
  }
  allocated_[code] = true;
  ++allocated_count_;
  return code;
}

void CodeAllocator::free(std::uint64_t code) {
  if (!is_allocated(code)) {
    throw DictError(Errc::kDoubleFree, "code " + std::to_string(code) + " is not allocated");
  }
  allocated_[code] = false;
  --allocated_count_;
  free_stack_.push_back(code);
}

std::uint64_t CodeAllocator::layout_bits(std::uint64_t range) {
  return range * width_for(range) + range + 2 * width_for(range + 1);
}

SpaceLedger CodeAllocator::space() const {
  SpaceLedger ledger;
  ledger.add("free_stack", range_ * width_for(range_));
  ledger.add("bitmap", range_);
  ledger.add("counters", 2 * width_for(range_ + 1));
  return ledger;
}

void CodeAllocator::serialize(BitWriter& out) const {
  const unsigned w = width_for(range_);
  for (std::uint64_t i = 0; i < range_; ++i) {
    out.put(i < free_stack_.size() ? free_stack_[i] : 0, w);
  }
  for (std::uint64_t i = 0; i < range_; ++i) out.put(allocated_[i] ? 1 : 0, 1);
  out.put(next_unused_, width_for(range_ + 1));
  out.put(free_stack_.size(), width_for(range_ + 1));
}

}  // namespace qdict

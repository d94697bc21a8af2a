// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/ph_dict.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qdict/error.hpp"

namespace qdict {

void PhOnlyParams::validate() const {
  if (n < 1) throw DictError(Errc::kInvalidParams, "n must be >= 1");
  if (universe_bits < 1 || universe_bits > 64) throw DictError(Errc::kInvalidParams, "lg u must be in [1, 64]");
  if (ceil_log2(n) > universe_bits) throw DictError(Errc::kInvalidParams, "need u >= n");
  if (!(c >= 1.0)) throw DictError(Errc::kInvalidParams, "c must be >= 1");
}

bool PhOnlyDict::uses_relabel(const PhOnlyParams& params) {
  const double lg_n = std::log2(static_cast<double>(params.n));
  const auto cutoff = std::uint64_t{1} << static_cast<unsigned>(std::ceil(lg_n / 2.0));
  return params.t <= cutoff;
}

unsigned PhOnlyDict::bucket_bits_for(const PhOnlyParams& params) {
  const double n = static_cast<double>(params.n);
  const double want = std::ceil(params.c * n * n / (static_cast<double>(params.t) + 1.0));
  unsigned bits = want >= 0x1p63 ? 64u : ceil_log2(static_cast<std::uint64_t>(want));
  bits = std::max(bits, ceil_log2(params.n));
  return std::min(bits, params.universe_bits);
}

PhOnlyDict::PhOnlyDict(const PhOnlyParams& params, Rng& rng)
    : params_(params), mode_(Mode::kComposed), rng_(rng.next()) {
  params_.validate();
  if (uses_relabel(params_)) {
    mode_ = Mode::kRelabel;
    build_relabel();
  } else {
    build_composed();
  }
  wire_observers();
}

PhOnlyDict::PhOnlyDict(const PhOnlyParams& params, Rng& rng, ComposedTag)
    : params_(params), mode_(Mode::kComposed), rng_(rng.next()) {
  params_.validate();
  build_composed();
  wire_observers();
}

void PhOnlyDict::build_composed() {
  bucket_bits_ = bucket_bits_for(params_);
  const auto& tun = params_.tunables;
  qhf_ = QuotientHashFn::sample(
      QhfParams{params_.universe_bits, bucket_bits_, params_.n, tun.alpha, tun.delta, false}, rng_);
  first_ = std::make_unique<MembPhDict>(MembPhParams{params_.n, params_.t / 2, bucket_bits_, tun}, rng_);
  const std::uint64_t half = params_.t / 2;
  const std::uint64_t cap2 = std::max<std::uint64_t>(1, (params_.t + 3) / 4);
  const std::uint64_t slack2 = half > cap2 ? half - cap2 : 0;
  second_ = std::make_unique<MembPhDict>(MembPhParams{cap2, slack2, params_.universe_bits, tun}, rng_);
}

void PhOnlyDict::build_relabel() {
  PhOnlyParams inner = params_;
  inner.t = params_.n;
  inner_.reset(new PhOnlyDict(inner, rng_, ComposedTag{}));
  relabel_ = PackedArray(inner_->code_range(), width_for(params_.n + 1));
  external_ = CodeAllocator(params_.n);
}

void PhOnlyDict::forward(std::span<const std::pair<Hashcode, Hashcode>> pairs, std::uint64_t offset) {
  if (!observer_) return;
  std::vector<std::pair<Hashcode, Hashcode>> shifted;
  shifted.reserve(pairs.size());
  for (const auto& [from, to] : pairs) shifted.emplace_back(from + offset, to + offset);
  observer_(shifted);
}

void PhOnlyDict::wire_observers() {
  if (mode_ == Mode::kComposed) {
    first_->set_relabel_observer([this](auto pairs) { forward(pairs, 0); });
    second_->set_relabel_observer([this](auto pairs) { forward(pairs, second_offset()); });
    return;
  }
  // Inner codes moved; external codes stay put.
  inner_->set_relabel_observer([this](std::span<const std::pair<Hashcode, Hashcode>> pairs) {
    std::vector<std::uint64_t> saved;
    saved.reserve(pairs.size());
    for (const auto& p : pairs) saved.push_back(relabel_.get(p.first));
    for (const auto& p : pairs) relabel_.set(p.first, 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) relabel_.set(pairs[i].second, saved[i]);
  });
}

Hashcode PhOnlyDict::insert(Key x) {
  if (x > low_mask(params_.universe_bits)) throw DictError(Errc::kOutOfDomain, "key >= u");
  if (live_ >= params_.n) throw DictError(Errc::kCapacityExceeded, "dictionary holds n keys");
  if (mode_ == Mode::kRelabel) {
    const Hashcode inner_code = inner_->insert(x);
    const std::uint64_t code = external_.alloc();
    relabel_.set(inner_code, code + 1);
    ++live_;
    return code;
  }
  if (second_->member(x)) throw DictError(Errc::kDuplicateKey, "key " + std::to_string(x) + " already resident");
  const std::uint64_t bucket = qhf_->bucket_of(x);
  Hashcode code;
  if (!first_->member(bucket)) {
    code = first_->insert(bucket);
  } else {
    if (second_->size() >= second_->params().n) {
      ++overflow_rebuilds_;
      throw DictError(Errc::kRebuildRequired, "collision structure full");
    }
    code = second_offset() + second_->insert(x);
    ++second_routed_;
  }
  ++live_;
  return code;
}

void PhOnlyDict::erase(Key x) {
  if (x > low_mask(params_.universe_bits)) throw DictError(Errc::kOutOfDomain, "key >= u");
  if (mode_ == Mode::kRelabel) {
    const auto inner_code = inner_->find_code(x);
    if (!inner_code) throw DictError(Errc::kNotResident, "key " + std::to_string(x) + " not resident");
    const std::uint64_t external = relabel_.get(*inner_code);
    inner_->erase(x);
    if (external != 0) {
      external_.free(external - 1);
      relabel_.set(*inner_code, 0);
    }
    --live_;
    return;
  }
  if (second_->member(x)) {
    second_->erase(x);
  } else {
    const std::uint64_t bucket = qhf_->bucket_of(x);
    if (!first_->member(bucket)) throw DictError(Errc::kNotResident, "key " + std::to_string(x) + " not resident");
    first_->erase(bucket);
  }
  --live_;
}

std::optional<Hashcode> PhOnlyDict::find_code(Key x) const noexcept {
  if (x > low_mask(params_.universe_bits)) return std::nullopt;
  if (mode_ == Mode::kRelabel) {
    const auto inner_code = inner_->find_code(x);
    if (!inner_code || *inner_code >= relabel_.size()) return std::nullopt;
    const std::uint64_t external = relabel_.get(*inner_code);
    if (external == 0) return std::nullopt;
    return external - 1;
  }
  if (auto code = second_->find_code(x)) return second_offset() + *code;
  return first_->find_code(qhf_->bucket_of(x));
}

void PhOnlyDict::rebuild(std::span<const Key> keys) {
  if (keys.size() > params_.n) throw DictError(Errc::kCapacityExceeded, "more than n keys");
  std::vector<Hashcode> before;
  before.reserve(keys.size());
  for (Key k : keys) {
    const auto code = find_code(k);
    if (!code) throw DictError(Errc::kNotResident, "rebuild key " + std::to_string(k) + " not resident");
    before.push_back(*code);
  }
  if (mode_ == Mode::kRelabel) {
    inner_->rebuild(keys);
    relabel_ = PackedArray(inner_->code_range(), width_for(params_.n + 1));
    for (std::size_t i = 0; i < keys.size(); ++i) relabel_.set(*inner_->find_code(keys[i]), before[i] + 1);
    return;
  }
  for (unsigned attempt = 0; attempt < kMaxRebuildAttempts; ++attempt) {
    live_ = 0;
    second_routed_ = 0;
    build_composed();
    wire_observers();
    bool ok = true;
    for (Key k : keys) {
      try {
        insert(k);
      } catch (const DictError& e) {
        if (e.code() != Errc::kRebuildRequired) throw;
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (observer_) {
      std::vector<std::pair<Hashcode, Hashcode>> moved;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const Hashcode now = *find_code(keys[i]);
        if (now != before[i]) moved.emplace_back(before[i], now);
      }
      if (!moved.empty()) observer_(moved);
    }
    return;
  }
  throw DictError(Errc::kCapacityExceeded, "rebuild attempts exhausted");
}

std::uint64_t PhOnlyDict::overflow_rebuilds() const noexcept {
  return overflow_rebuilds_ + (inner_ ? inner_->overflow_rebuilds() : 0);
}

std::uint64_t PhOnlyDict::inner_rebuilds() const noexcept {
  if (inner_) return inner_->inner_rebuilds();
  return first_->rebuilds() + second_->rebuilds();
}

std::uint64_t PhOnlyDict::second_routed() const noexcept {
  return inner_ ? inner_->second_routed() : second_routed_;
}

SpaceLedger PhOnlyDict::space() const {
  SpaceLedger ledger;
  if (mode_ == Mode::kRelabel) {
    ledger.merge("inner", inner_->space());
    ledger.add("relabel.map", relabel_.bit_size());
    ledger.merge("relabel.codes", external_.space());
  } else {
    ledger.add("hash", qhf_->space_bits());
    ledger.merge("first", first_->space());
    ledger.merge("second", second_->space());
  }
  // live, overflow_rebuilds, second_routed
  ledger.add("counters", 192);
  return ledger;
}

void PhOnlyDict::serialize(BitWriter& out) const {
  if (mode_ == Mode::kRelabel) {
    inner_->serialize(out);
    for (std::size_t i = 0; i < relabel_.size(); ++i) out.put(relabel_.get(i), relabel_.width());
    external_.serialize(out);
  } else {
    qhf_->serialize(out);
    first_->serialize(out);
    second_->serialize(out);
  }
  out.put(live_, 64);
  out.put(overflow_rebuilds_, 64);
  out.put(second_routed_, 64);
}

}  // namespace qdict

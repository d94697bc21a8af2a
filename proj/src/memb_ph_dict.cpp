// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/memb_ph_dict.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdict/error.hpp"

namespace qdict {
namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

std::uint64_t MembPhParams::t_eff() const noexcept {
  const unsigned __int128 sq = static_cast<unsigned __int128>(n) * n;
  const unsigned __int128 ratio = sq >> universe_bits;
  const std::uint64_t cap = ratio == 0 ? 1 : static_cast<std::uint64_t>(std::min<unsigned __int128>(ratio, ~std::uint64_t{0}));
  return std::min(t, cap);
}

void MembPhParams::validate() const {
  if (n < 1) throw DictError(Errc::kInvalidParams, "n must be >= 1");
  if (universe_bits < 1 || universe_bits > 64) throw DictError(Errc::kInvalidParams, "lg u must be in [1, 64]");
  if (ceil_log2(n) > universe_bits) throw DictError(Errc::kInvalidParams, "need u >= n");
  if (n > (std::uint64_t{1} << 40) || t > (std::uint64_t{1} << 40)) {
    throw DictError(Errc::kInvalidParams, "n and t must be <= 2^40");
  }
  const auto& c = tunables;
  if (!(c.c1 > 0 && c.c1 <= 1.0 / 3.0)) throw DictError(Errc::kInvalidParams, "c1 must be in (0, 1/3]");
  if (!(c.c2 > 0)) throw DictError(Errc::kInvalidParams, "c2 must be positive");
  if (!(c.c4 > 0)) throw DictError(Errc::kInvalidParams, "c4 must be positive");
  if (!(c.alpha > 0 && c.alpha < 1)) throw DictError(Errc::kInvalidParams, "alpha must be in (0, 1)");
  if (!(c.delta > 0 && c.delta < 1)) throw DictError(Errc::kInvalidParams, "delta must be in (0, 1)");
}

MembPhPlan MembPhPlan::make(const MembPhParams& params) {
  params.validate();
  MembPhPlan plan;
  plan.t_eff = params.t_eff();
  const std::uint64_t n = params.n;
  const double lg_n = std::log2(static_cast<double>(n));
  const auto sqrt_cutoff = std::uint64_t{1} << static_cast<unsigned>(std::ceil(lg_n / 2.0));
  if (static_cast<double>(params.universe_bits) >= 1.5 * lg_n || plan.t_eff <= sqrt_cutoff) {
    plan.mode = Mode::kBruteForce;
    return plan;
  }
  plan.mode = Mode::kLayered;
  const std::uint64_t t = plan.t_eff;
  const auto& c = params.tunables;
  const std::uint64_t third = ceil_div(t, 3);
  plan.level3_budget = third;

  // Level 2: only when c1 t > n / lg n; bucket count shrinks until its
  // codes fit the t/3 block.
  if (c.c1 * static_cast<double>(t) > static_cast<double>(n) / lg_n) {
    const double want = std::ceil(c.c1 * static_cast<double>(t) / std::pow(lg_n, 0.25));
    std::uint64_t buckets = next_pow2(static_cast<std::uint64_t>(std::max(1.0, want)));
    buckets = std::min(buckets, std::uint64_t{1} << (params.universe_bits - 1));
    TileLayout layout;
    for (;;) {
      const unsigned v_bits = params.universe_bits - floor_log2(buckets);
      layout = TileLayout::make(std::min(v_bits, 31u), n, c.c4);
      if (buckets * layout.codes <= third || buckets == 1) break;
      buckets /= 2;
    }
    const unsigned v_bits = params.universe_bits - floor_log2(buckets);
    if (v_bits > kMaxTileUniverseBits) {
      plan = MembPhPlan{};
      plan.mode = Mode::kBruteForce;
      plan.t_eff = t;
      return plan;
    }
    if (buckets * layout.codes <= third) {
      plan.level2_buckets = buckets;
      plan.level2_bucket_bits = floor_log2(buckets);
      plan.level2_budget = third;
      plan.level2_layout = std::move(layout);
      const auto pools = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
      plan.level2_pools = std::min(pools, buckets);
    }
  }
  plan.level1_budget = std::min(third, t - plan.level2_budget - plan.level3_budget);

  const double ratio = static_cast<double>(n) / static_cast<double>(t);
  const double mu_real = c.c2 * ratio * ratio * ratio;
  const std::uint64_t n_pow2 = next_pow2(n);
  std::uint64_t mu = mu_real >= static_cast<double>(n_pow2)
                         ? n_pow2
                         : next_pow2(static_cast<std::uint64_t>(std::ceil(mu_real)));
  mu = std::min(std::max<std::uint64_t>(mu, 8), n_pow2);
  plan.mu = mu;
  const std::uint64_t b1 = n_pow2 / mu;
  plan.level1_bucket_bits = floor_log2(b1);
  const auto slack = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(mu), 2.0 / 3.0)));
  plan.level1_bucket_capacity = std::max<std::uint64_t>(1, std::min(mu + slack, (n + plan.level1_budget) / b1));
  return plan;
}

MembPhDict::MembPhDict(const MembPhParams& params, Rng& rng)
    : params_(params), plan_(MembPhPlan::make(params)), rng_(rng.next()) {
  layers_ = sample_layers();
}

MembPhDict::Layers MembPhDict::sample_layers() {
  Layers layers;
  const unsigned u_bits = params_.universe_bits;
  if (plan_.mode == Mode::kBruteForce) {
    layers.brute = BaseDict(u_bits, width_for(params_.n), params_.n, rng_, BaseDict::Policy::kRebuild);
    layers.brute_codes = CodeAllocator(params_.n);
    return layers;
  }
  const auto& tun = params_.tunables;
  QhfParams q1{u_bits, plan_.level1_bucket_bits, params_.n, tun.alpha, tun.delta, false};
  layers.qhf1 = QuotientHashFn::sample(q1, rng_);
  const std::uint64_t b1 = std::uint64_t{1} << plan_.level1_bucket_bits;
  const std::uint64_t cap1 = plan_.level1_bucket_capacity;
  layers.dicts1.reserve(b1);
  layers.codes1.reserve(b1);
  for (std::uint64_t b = 0; b < b1; ++b) {
    layers.dicts1.emplace_back(u_bits - plan_.level1_bucket_bits, width_for(cap1), cap1, rng_,
                               BaseDict::Policy::kNoRebuild);
    layers.codes1.emplace_back(cap1);
  }
  if (plan_.level2_buckets > 0) {
    QhfParams q2{u_bits, plan_.level2_bucket_bits, params_.n, tun.alpha, tun.delta, false};
    layers.qhf2 = QuotientHashFn::sample(q2, rng_);
    layers.layout2 = std::make_shared<const TileLayout>(plan_.level2_layout);
    auto pools = std::make_shared<std::vector<std::vector<StoredPerm>>>();
    const std::uint64_t v = std::uint64_t{1} << layers.layout2->universe_bits;
    for (std::uint64_t p = 0; p < plan_.level2_pools; ++p) {
      auto& pool = pools->emplace_back();
      for (unsigned i = 0; i < layers.layout2->levels(); ++i) pool.push_back(StoredPerm::sample(v, rng_));
    }
    layers.pools2 = pools;
    layers.tiles2.reserve(plan_.level2_buckets);
    for (std::uint64_t b = 0; b < plan_.level2_buckets; ++b) {
      layers.tiles2.emplace_back(*layers.layout2, (*layers.pools2)[b % plan_.level2_pools]);
    }
  }
  layers.dict3 = BaseDict(u_bits, width_for(plan_.level3_budget), plan_.level3_budget, rng_,
                          BaseDict::Policy::kRebuild);
  layers.codes3 = CodeAllocator(plan_.level3_budget);
  return layers;
}

std::optional<Hashcode> MembPhDict::try_insert(Layers& layers, Key x) const {
  if (plan_.mode == Mode::kBruteForce) {
    const std::uint64_t code = layers.brute_codes.alloc();
    layers.brute.insert(x, code);
    ++layers.counts[0];
    return code;
  }
  const BucketQuotient bq1 = layers.qhf1.eval(x);
  auto& dict = layers.dicts1[bq1.bucket];
  if (dict.size() < dict.capacity()) {
    auto& codes = layers.codes1[bq1.bucket];
    const std::uint64_t local = codes.alloc();
    if (dict.insert(bq1.quotient, local) != BaseDict::InsertOutcome::kFailed) {
      ++layers.counts[1];
      return bq1.bucket * plan_.level1_bucket_capacity + local;
    }
    codes.free(local);
  }
  if (!layers.tiles2.empty()) {
    const BucketQuotient bq2 = layers.qhf2.eval(x);
    auto& bucket = layers.tiles2[bq2.bucket];
    if (const auto pos = bucket.insert(bq2.quotient)) {
      ++layers.counts[2];
      return plan_.level2_offset(params_.n) + bq2.bucket * plan_.level2_layout.codes + bucket.code_of(*pos);
    }
  }
  if (layers.dict3.size() < layers.dict3.capacity()) {
    const std::uint64_t code = layers.codes3.alloc();
    layers.dict3.insert(x, code);
    ++layers.counts[3];
    return plan_.level3_offset(params_.n) + code;
  }
  return std::nullopt;
}

Hashcode MembPhDict::insert(Key x) {
  if (x > low_mask(params_.universe_bits)) throw DictError(Errc::kOutOfDomain, "key >= u");
  if (member(x)) throw DictError(Errc::kDuplicateKey, "key " + std::to_string(x) + " already resident");
  if (live_ >= params_.n) throw DictError(Errc::kCapacityExceeded, "dictionary holds n keys");
  if (auto code = try_insert(layers_, x)) {
    ++live_;
    return *code;
  }
  const Hashcode code = rebuild_with(x);
  ++live_;
  return code;
}

Hashcode MembPhDict::rebuild_with(Key x) {
  const auto old = residents();
  for (unsigned attempt = 0; attempt < kMaxRebuildAttempts; ++attempt) {
    Layers fresh = sample_layers();
    std::vector<std::pair<Hashcode, Hashcode>> relabel;
    relabel.reserve(old.size());
    bool ok = true;
    for (const auto& [key, code] : old) {
      const auto next = try_insert(fresh, key);
      if (!next) {
        ok = false;
        break;
      }
      relabel.emplace_back(code, *next);
    }
    std::optional<Hashcode> mine;
    if (ok) mine = try_insert(fresh, x);
    if (!mine) continue;
    layers_ = std::move(fresh);
    ++rebuilds_;
    if (observer_) observer_(relabel);
    return *mine;
  }
  throw DictError(Errc::kCapacityExceeded, "rebuild attempts exhausted");
}

std::optional<Hashcode> MembPhDict::find_code(Key x) const noexcept {
  if (x > low_mask(params_.universe_bits)) return std::nullopt;
  if (plan_.mode == Mode::kBruteForce) return layers_.brute.lookup(x);
  const BucketQuotient bq1 = layers_.qhf1.eval(x);
  if (auto local = layers_.dicts1[bq1.bucket].lookup(bq1.quotient)) {
    return bq1.bucket * plan_.level1_bucket_capacity + *local;
  }
  if (!layers_.tiles2.empty()) {
    const BucketQuotient bq2 = layers_.qhf2.eval(x);
    const auto& bucket = layers_.tiles2[bq2.bucket];
    if (const auto pos = bucket.query(bq2.quotient)) {
      return plan_.level2_offset(params_.n) + bq2.bucket * plan_.level2_layout.codes + bucket.code_of(*pos);
    }
  }
  if (auto code = layers_.dict3.lookup(x)) return plan_.level3_offset(params_.n) + *code;
  return std::nullopt;
}

std::optional<int> MembPhDict::level_of(Key x) const noexcept {
  if (x > low_mask(params_.universe_bits)) return std::nullopt;
  if (plan_.mode == Mode::kBruteForce) {
    return layers_.brute.contains(x) ? std::optional<int>(0) : std::nullopt;
  }
  const BucketQuotient bq1 = layers_.qhf1.eval(x);
  if (layers_.dicts1[bq1.bucket].contains(bq1.quotient)) return 1;
  if (!layers_.tiles2.empty()) {
    const BucketQuotient bq2 = layers_.qhf2.eval(x);
    if (layers_.tiles2[bq2.bucket].query(bq2.quotient)) return 2;
  }
  if (layers_.dict3.contains(x)) return 3;
  return std::nullopt;
}

Hashcode MembPhDict::hashcode(Key x) const {
  if (auto code = find_code(x)) return *code;
  throw DictError(Errc::kNotResident, "key " + std::to_string(x) + " not resident");
}

void MembPhDict::erase(Key x) {
  if (x > low_mask(params_.universe_bits)) throw DictError(Errc::kOutOfDomain, "key >= u");
  auto& L = layers_;
  if (plan_.mode == Mode::kBruteForce) {
    const auto code = L.brute.lookup(x);
    if (!code) throw DictError(Errc::kNotResident, "key " + std::to_string(x) + " not resident");
    L.brute.erase(x);
    L.brute_codes.free(*code);
    --L.counts[0];
    --live_;
    return;
  }
  const BucketQuotient bq1 = L.qhf1.eval(x);
  if (auto local = L.dicts1[bq1.bucket].lookup(bq1.quotient)) {
    L.dicts1[bq1.bucket].erase(bq1.quotient);
    L.codes1[bq1.bucket].free(*local);
    --L.counts[1];
    --live_;
    return;
  }
  if (!L.tiles2.empty()) {
    const BucketQuotient bq2 = L.qhf2.eval(x);
    auto& bucket = L.tiles2[bq2.bucket];
    if (bucket.query(bq2.quotient)) {
      bucket.erase(bq2.quotient);
      --L.counts[2];
      --live_;
      return;
    }
  }
  if (auto code = L.dict3.lookup(x)) {
    L.dict3.erase(x);
    L.codes3.free(*code);
    --L.counts[3];
    --live_;
    return;
  }
  throw DictError(Errc::kNotResident, "key " + std::to_string(x) + " not resident");
}

std::vector<std::pair<Key, Hashcode>> MembPhDict::residents() const {
  std::vector<std::pair<Key, Hashcode>> out;
  out.reserve(live_);
  for_each([&](Key k, Hashcode c) { out.emplace_back(k, c); });
  return out;
}

std::uint64_t MembPhDict::level_count(int level) const noexcept {
  return level >= 0 && level <= 3 ? layers_.counts[level] : 0;
}

std::uint64_t MembPhDict::level1_dict_rebuilds() const noexcept {
  std::uint64_t total = 0;
  for (const auto& d : layers_.dicts1) total += d.rebuild_count();
  return total;
}

SpaceLedger MembPhDict::space() const {
  SpaceLedger ledger;
  const auto& L = layers_;
  if (plan_.mode == Mode::kBruteForce) {
    ledger.add("brute.dict", L.brute.space_bits());
    ledger.add("brute.codes", L.brute_codes.space_bits());
  } else {
    ledger.add("level1.hash", L.qhf1.space_bits());
    std::uint64_t dicts = 0, codes = 0;
    for (const auto& d : L.dicts1) dicts += d.space_bits();
    for (const auto& c : L.codes1) codes += c.space_bits();
    ledger.add("level1.dicts", dicts);
    ledger.add("level1.codes", codes);
    if (!L.tiles2.empty()) {
      ledger.add("level2.hash", L.qhf2.space_bits());
      ledger.add("level2.tiles", L.tiles2.size() * L.layout2->bucket_bits());
      std::uint64_t pools = 0;
      for (const auto& pool : *L.pools2) {
        for (const auto& p : pool) pools += p.space_bits();
      }
      ledger.add("level2.pools", pools);
    }
    ledger.add("level3.dict", L.dict3.space_bits());
    ledger.add("level3.codes", L.codes3.space_bits());
  }
  // live count and rebuild count
  ledger.add("counters", 128);
  return ledger;
}

void MembPhDict::serialize(BitWriter& out) const {
  const auto& L = layers_;
  if (plan_.mode == Mode::kBruteForce) {
    L.brute.serialize(out);
    L.brute_codes.serialize(out);
  } else {
    L.qhf1.serialize(out);
    for (const auto& d : L.dicts1) d.serialize(out);
    for (const auto& c : L.codes1) c.serialize(out);
    if (!L.tiles2.empty()) {
      L.qhf2.serialize(out);
      for (const auto& b : L.tiles2) b.serialize(out);
      for (const auto& pool : *L.pools2) {
        for (const auto& p : pool) p.serialize(out);
      }
    }
    L.dict3.serialize(out);
    L.codes3.serialize(out);
  }
  out.put(live_, 64);
  out.put(rebuilds_, 64);
}

}  // namespace qdict

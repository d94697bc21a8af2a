// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/quotient_hash.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "qdict/error.hpp"

namespace qdict {

void QhfParams::validate() const {
  if (universe_bits < 1 || universe_bits > 64) {
    throw DictError(Errc::kInvalidParams, "lg u must be in [1, 64]");
  }
  if (bucket_bits > universe_bits) throw DictError(Errc::kInvalidParams, "b must not exceed u");
  if (n < 1 || ceil_log2(n) > universe_bits) throw DictError(Errc::kInvalidParams, "need 1 <= n <= u");
  if (!(alpha > 0 && alpha < 1)) throw DictError(Errc::kInvalidParams, "alpha must be in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw DictError(Errc::kInvalidParams, "delta must be in (0, 1)");
}

QuotientHashFn QuotientHashFn::sample(const QhfParams& params, Rng& rng) {
  params.validate();
  QuotientHashFn h;
  h.params_ = params;
  const unsigned u_bits = params.universe_bits;
  if (params.identity) {
    h.reduced_bits_ = u_bits;
    h.reduce_ = AffinePerm::identity(u_bits);
    return h;
  }
  h.reduce_ = AffinePerm::sample(u_bits, rng);
  h.reduced_bits_ = u_bits;
  if (params.n < kGridThreshold) return h;

  const unsigned lg_n = ceil_log2(params.n);
  h.grid_ = true;
  h.reduced_bits_ = std::min(u_bits, kReductionExponent * lg_n);
  h.column_bits_ = (3 * lg_n + 3) / 4;
  const unsigned rows = h.row_bits();
  h.shifts_ = ShiftFamily::sample(h.column_bits_, rows, rng);
  if (rows > 0) {
    h.col_perms_.reserve(std::size_t{1} << h.column_bits_);
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << h.column_bits_); ++c) {
      h.col_perms_.push_back(AffinePerm::sample(rows, rng));
    }
  }
  if (!params.buckets_at_least_n()) {
    const unsigned first_order_total = (5 * lg_n + 3) / 4;
    h.first_order_bits_ = std::min(first_order_total - h.column_bits_, rows);
    h.group_bits_ = std::min((lg_n + 3) / 4, h.column_bits_);
    if (h.first_order_bits_ > 0) {
      const std::uint64_t groups = std::uint64_t{1} << h.group_bits_;
      h.group_perms_.reserve(groups);
      for (std::uint64_t g = 0; g < groups; ++g) {
        h.group_perms_.push_back(StoredPerm::sample(std::uint64_t{1} << h.first_order_bits_, rng));
      }
    } else {
      h.group_bits_ = 0;
    }
  }
  return h;
}

std::uint64_t QuotientHashFn::forward(std::uint64_t x) const noexcept {
  if (params_.identity) return x;
  const std::uint64_t y = reduce_.apply(x);
  if (!grid_) return y;

  const unsigned excess = params_.universe_bits - reduced_bits_;
  const unsigned rows = row_bits();
  const std::uint64_t e = y & low_mask(excess);
  const std::uint64_t r = y >> excess;

  std::uint64_t column = r >> rows;
  std::uint64_t row = r & low_mask(rows);
  column = (column + shifts_.shift_of_row(row)) & low_mask(column_bits_);
  if (rows > 0) row = col_perms_[column].apply(row);
  if (!group_perms_.empty()) {
    const unsigned low = rows - first_order_bits_;
    const std::uint64_t group = column >> (column_bits_ - group_bits_);
    const std::uint64_t first_order = group_perms_[group].apply(row >> low);
    row = (first_order << low) | (row & low_mask(low));
  }
  const std::uint64_t z = (column << rows) | row;
  return (z << excess) | e;
}

std::uint64_t QuotientHashFn::backward(std::uint64_t w) const noexcept {
  if (params_.identity) return w;
  if (!grid_) return reduce_.invert(w);

  const unsigned excess = params_.universe_bits - reduced_bits_;
  const unsigned rows = row_bits();
  const std::uint64_t e = w & low_mask(excess);
  const std::uint64_t z = w >> excess;

  std::uint64_t column = z >> rows;
  std::uint64_t row = z & low_mask(rows);
  if (!group_perms_.empty()) {
    const unsigned low = rows - first_order_bits_;
    const std::uint64_t group = column >> (column_bits_ - group_bits_);
    const std::uint64_t first_order = group_perms_[group].invert(row >> low);
    row = (first_order << low) | (row & low_mask(low));
  }
  if (rows > 0) row = col_perms_[column].invert(row);
  column = (column - shifts_.shift_of_row(row)) & low_mask(column_bits_);
  const std::uint64_t r = (column << rows) | row;
  return reduce_.invert((r << excess) | e);
}

BucketQuotient QuotientHashFn::eval(Key x) const noexcept {
  const std::uint64_t w = forward(x);
  const unsigned qbits = params_.quotient_bits();
  return {qbits >= 64 ? 0 : w >> qbits, w & low_mask(qbits)};
}

Key QuotientHashFn::invert(std::uint64_t bucket, std::uint64_t quotient) const noexcept {
  const unsigned qbits = params_.quotient_bits();
  const std::uint64_t w = (qbits >= 64 ? 0 : bucket << qbits) | quotient;
  return backward(w);
}

BucketQuotient QuotientHashFn::eval_checked(Key x) const {
  if (x > low_mask(params_.universe_bits)) throw DictError(Errc::kOutOfDomain, "key >= u");
  return eval(x);
}

Key QuotientHashFn::invert_checked(std::uint64_t bucket, std::uint64_t quotient) const {
  if (bucket > low_mask(params_.bucket_bits)) throw DictError(Errc::kOutOfDomain, "bucket >= b");
  if (quotient > low_mask(params_.quotient_bits())) throw DictError(Errc::kOutOfDomain, "quotient >= u/b");
  return invert(bucket, quotient);
}

SpaceLedger QuotientHashFn::space() const {
  SpaceLedger ledger;
  ledger.add("params", kParamBits);
  if (params_.identity) return ledger;
  ledger.add("reduction", reduce_.space_bits());
  if (grid_) {
    ledger.add("row_shifts", shifts_.space_bits());
    std::uint64_t cols = 0;
    for (const auto& p : col_perms_) cols += p.space_bits();
    ledger.add("column_perms", cols);
    std::uint64_t groups = 0;
    for (const auto& p : group_perms_) groups += p.space_bits();
    ledger.add("group_perms", groups);
  }
  return ledger;
}

void QuotientHashFn::serialize(BitWriter& out) const {
  out.put(params_.universe_bits, 64);
  out.put(params_.bucket_bits, 64);
  out.put(params_.n, 64);
  if (params_.identity) return;
  reduce_.serialize(out);
  if (grid_) {
    shifts_.serialize(out);
    for (const auto& p : col_perms_) p.serialize(out);
    for (const auto& p : group_perms_) p.serialize(out);
  }
}

CollisionCensus census_from_buckets(std::vector<std::uint64_t> buckets, double threshold) {
  std::sort(buckets.begin(), buckets.end());
  CollisionCensus census;
  census.threshold = threshold;
  std::size_t i = 0;
  while (i < buckets.size()) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    const std::uint64_t load = j - i;
    if (census.load_histogram.size() <= load) census.load_histogram.resize(load + 1, 0);
    ++census.load_histogram[load];
    if (static_cast<double>(load) >= threshold) census.count += load;
    i = j;
  }
  return census;
}

CollisionCensus collision_census(const QuotientHashFn& h, std::span<const Key> keys, double threshold) {
  std::vector<std::uint64_t> buckets;
  buckets.reserve(keys.size());
  for (Key x : keys) buckets.push_back(h.bucket_of(x));
  return census_from_buckets(std::move(buckets), threshold);
}

OverflowTrace insertion_overflow_trace(const QuotientHashFn& h, std::span<const WorkloadOp> workload,
                                       std::uint64_t capacity) {
  OverflowTrace trace;
  std::unordered_map<std::uint64_t, std::uint64_t> loads;
  std::unordered_map<Key, bool> live;  // key -> overflowed at insertion
  std::uint64_t live_overflow = 0;
  for (const auto& op : workload) {
    const std::uint64_t bucket = h.bucket_of(op.key);
    if (op.kind == WorkloadOp::Kind::kInsert) {
      if (live.contains(op.key)) {
        throw DictError(Errc::kMalformedWorkload, "insert of live key " + std::to_string(op.key));
      }
      auto& load = loads[bucket];
      const bool overflow = load >= capacity;
      ++load;
      live.emplace(op.key, overflow);
      if (overflow) {
        ++trace.overflow_insertions;
        ++live_overflow;
      }
    } else {
      auto it = live.find(op.key);
      if (it == live.end()) {
        throw DictError(Errc::kMalformedWorkload, "delete of absent key " + std::to_string(op.key));
      }
      if (it->second) --live_overflow;
      live.erase(it);
      if (--loads[bucket] == 0) loads.erase(bucket);
    }
    trace.peak_live_overflow = std::max(trace.peak_live_overflow, live_overflow);
    trace.peak_live = std::max<std::uint64_t>(trace.peak_live, live.size());
  }
  trace.final_live_overflow = live_overflow;
  return trace;
}

double census_bound_dense(std::uint64_t n, unsigned bucket_bits, double alpha) {
  const double nd = static_cast<double>(n);
  return 2.0 * nd * nd / std::ldexp(1.0, static_cast<int>(bucket_bits)) + std::pow(nd, alpha);
}

double census_bound_sparse(std::uint64_t n, unsigned bucket_bits, double alpha, double delta) {
  const double nd = static_cast<double>(n);
  const double b = std::ldexp(1.0, static_cast<int>(bucket_bits));
  return 2.0 * nd * std::exp(-delta * delta * nd / (3.0 * b)) + std::pow(nd, alpha);
}

double sparse_threshold(std::uint64_t n, unsigned bucket_bits, double delta) {
  return (1.0 + delta) * static_cast<double>(n) / std::ldexp(1.0, static_cast<int>(bucket_bits)) + 1.0;
}

}  // namespace qdict

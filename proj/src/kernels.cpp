// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>

#include "qdict/error.hpp"

namespace qdict::kernels {
namespace {

constexpr unsigned kMaxExhaustiveBits = 32;
// Bucket histograms up to this many buckets are dense arrays; above it the
// census sorts bucket ids instead.
constexpr unsigned kDenseHistogramBits = 24;

void require_exhaustive(const QuotientHashFn& h) {
  if (h.params().universe_bits > kMaxExhaustiveBits) {
    throw DictError(Errc::kInvalidParams, "exhaustive check needs lg u <= 32");
  }
}

std::uint64_t packed(const QuotientHashFn& h, BucketQuotient bq) noexcept {
  return (bq.bucket << h.quotient_bits()) | bq.quotient;
}

}  // namespace

void eval_serial(const QuotientHashFn& h, std::span<const Key> keys, std::span<BucketQuotient> out) {
  for (std::size_t i = 0; i < keys.size(); ++i) out[i] = h.eval(keys[i]);
}

void eval_parallel(const QuotientHashFn& h, std::span<const Key> keys, std::span<BucketQuotient> out) {
  const auto count = static_cast<std::int64_t>(keys.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) out[i] = h.eval(keys[i]);
}

BijectivityReport check_bijective_serial(const QuotientHashFn& h) {
  require_exhaustive(h);
  BijectivityReport report;
  report.domain = std::uint64_t{1} << h.params().universe_bits;
  const std::uint64_t buckets = h.bucket_count();
  const std::uint64_t quotients = std::uint64_t{1} << h.quotient_bits();
  std::vector<bool> seen(report.domain, false);
  for (std::uint64_t x = 0; x < report.domain; ++x) {
    const BucketQuotient bq = h.eval(x);
    if (bq.bucket >= buckets || bq.quotient >= quotients) {
      ++report.out_of_range;
      continue;
    }
    const std::uint64_t slot = packed(h, bq);
    if (seen[slot]) ++report.duplicate_outputs;
    seen[slot] = true;
    if (h.invert(bq) != x) ++report.inverse_mismatches;
  }
  return report;
}

BijectivityReport check_bijective_parallel(const QuotientHashFn& h) {
  require_exhaustive(h);
  BijectivityReport report;
  report.domain = std::uint64_t{1} << h.params().universe_bits;
  const std::uint64_t buckets = h.bucket_count();
  const std::uint64_t quotients = std::uint64_t{1} << h.quotient_bits();
  std::vector<std::uint64_t> seen((report.domain + 63) / 64, 0);
  std::uint64_t dup = 0, mismatch = 0, range = 0;
  const auto domain = static_cast<std::int64_t>(report.domain);
#pragma omp parallel for schedule(static) reduction(+ : dup, mismatch, range)
  for (std::int64_t i = 0; i < domain; ++i) {
    const auto x = static_cast<std::uint64_t>(i);
    const BucketQuotient bq = h.eval(x);
    if (bq.bucket >= buckets || bq.quotient >= quotients) {
      ++range;
      continue;
    }
    const std::uint64_t slot = packed(h, bq);
    const std::uint64_t bit = std::uint64_t{1} << (slot % 64);
    const std::uint64_t prev = std::atomic_ref<std::uint64_t>(seen[slot / 64]).fetch_or(bit);
    if (prev & bit) ++dup;
    if (h.invert(bq) != x) ++mismatch;
  }
  report.duplicate_outputs = dup;
  report.inverse_mismatches = mismatch;
  report.out_of_range = range;
  return report;
}

CollisionCensus census_serial(const QuotientHashFn& h, std::span<const Key> keys, double threshold) {
  return collision_census(h, keys, threshold);
}

CollisionCensus census_parallel(const QuotientHashFn& h, std::span<const Key> keys, double threshold) {
  const auto count = static_cast<std::int64_t>(keys.size());
  std::vector<std::uint64_t> buckets(keys.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) buckets[i] = h.bucket_of(keys[i]);

  if (h.params().bucket_bits > kDenseHistogramBits) {
    return census_from_buckets(std::move(buckets), threshold);
  }

  std::vector<std::uint32_t> loads(h.bucket_count(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    std::atomic_ref<std::uint32_t>(loads[buckets[i]]).fetch_add(1, std::memory_order_relaxed);
  }

  CollisionCensus census;
  census.threshold = threshold;
  std::uint32_t max_load = 0;
  const auto nbuckets = static_cast<std::int64_t>(loads.size());
#pragma omp parallel for schedule(static) reduction(max : max_load)
  for (std::int64_t j = 0; j < nbuckets; ++j) max_load = std::max(max_load, loads[j]);
  census.load_histogram.assign(max_load + 1, 0);
  for (std::uint32_t load : loads) {
    if (load == 0) continue;
    ++census.load_histogram[load];
    if (static_cast<double>(load) >= threshold) census.count += load;
  }
  // Trailing zero entries never occur: max_load is attained.
  if (max_load == 0) census.load_histogram.clear();
  return census;
}

}  // namespace qdict::kernels

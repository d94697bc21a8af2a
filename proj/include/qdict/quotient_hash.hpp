// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qdict/bits.hpp"
#include "qdict/perm_core.hpp"
#include "qdict/rng.hpp"
#include "qdict/space.hpp"

namespace qdict {

using Key = std::uint64_t;

struct QhfParams {
  unsigned universe_bits = 0;  // u = 2^universe_bits, 1..64
  unsigned bucket_bits = 0;    // b = 2^bucket_bits, <= universe_bits
  std::uint64_t n = 1;         // set-size upper bound, 1 <= n <= u
  double alpha = 0.95;
  double delta = 0.5;
  bool identity = false;       // force every randomized component to the identity

  bool buckets_at_least_n() const noexcept { return bucket_bits >= ceil_log2(n); }
  unsigned quotient_bits() const noexcept { return universe_bits - bucket_bits; }
  void validate() const;
};

struct BucketQuotient {
  std::uint64_t bucket = 0;
  std::uint64_t quotient = 0;
  friend bool operator==(const BucketQuotient&, const BucketQuotient&) = default;
};

/// A sampled bijection [u] -> [b] x [u/b].
///
/// Pipeline for n >= 256 (all counts rounded up to powers of two, lg n
/// rounded up):
///   1. a 2-independent affine permutation of [u]; its top min(lg u, 6 lg n)
///      bits are kept as the reduced value, the rest joins the quotient;
///   2. the reduced value is read as a grid of 2^ceil(3/4 lg n) columns (high
///      bits) by rows (low bits); each row is circularly shifted by a keyed
///      per-row amount;
///   3. each column's rows are permuted by an independent affine permutation;
///   4. when b < n, the top ceil(5/4 lg n) - ceil(3/4 lg n) row bits (the
///      first-order bucket inside the column) are permuted by a stored random
///      permutation shared by a group of 2^ceil(1/4 lg n) consecutive columns.
/// The transformed word's top lg b bits are the bucket and the rest is the
/// quotient. For n < 256 only the affine permutation of [u] is used. With
/// `identity` set every step is the identity, so bucket = x >> lg(u/b) and
/// quotient = x mod u/b.
class QuotientHashFn {
 public:
  static constexpr unsigned kReductionExponent = 6;
  static constexpr std::uint64_t kGridThreshold = 256;
  static constexpr std::uint64_t kParamBits = 3 * 64;

  QuotientHashFn() = default;
  static QuotientHashFn sample(const QhfParams& params, Rng& rng);

  BucketQuotient eval(Key x) const noexcept;
  Key invert(std::uint64_t bucket, std::uint64_t quotient) const noexcept;
  Key invert(BucketQuotient bq) const noexcept { return invert(bq.bucket, bq.quotient); }
  std::uint64_t bucket_of(Key x) const noexcept { return eval(x).bucket; }

  /// Checked variants: throw DictError(kOutOfDomain) on out-of-range input.
  BucketQuotient eval_checked(Key x) const;
  Key invert_checked(std::uint64_t bucket, std::uint64_t quotient) const;

  const QhfParams& params() const noexcept { return params_; }
  std::uint64_t bucket_count() const noexcept { return std::uint64_t{1} << params_.bucket_bits; }
  unsigned quotient_bits() const noexcept { return params_.quotient_bits(); }
  unsigned reduced_bits() const noexcept { return reduced_bits_; }
  unsigned column_bits() const noexcept { return column_bits_; }
  unsigned row_bits() const noexcept { return reduced_bits_ - column_bits_; }
  unsigned group_bits() const noexcept { return group_bits_; }
  unsigned first_order_bits() const noexcept { return first_order_bits_; }
  bool uses_grid() const noexcept { return grid_; }

  const AffinePerm& reduction() const noexcept { return reduce_; }
  const ShiftFamily& shifts() const noexcept { return shifts_; }
  const std::vector<AffinePerm>& column_perms() const noexcept { return col_perms_; }
  const std::vector<StoredPerm>& group_perms() const noexcept { return group_perms_; }

  SpaceLedger space() const;
  std::uint64_t space_bits() const { return space().total(); }
  void serialize(BitWriter& out) const;

 private:
  std::uint64_t forward(std::uint64_t x) const noexcept;
  std::uint64_t backward(std::uint64_t w) const noexcept;

  QhfParams params_{};
  bool grid_ = false;
  unsigned reduced_bits_ = 0;
  unsigned column_bits_ = 0;
  unsigned group_bits_ = 0;
  unsigned first_order_bits_ = 0;
  AffinePerm reduce_;
  ShiftFamily shifts_;
  std::vector<AffinePerm> col_perms_;
  std::vector<StoredPerm> group_perms_;
};

/// Elements of S whose bucket holds at least `threshold` elements of S.
struct CollisionCensus {
  double threshold = 0;
  std::uint64_t count = 0;
  /// load_histogram[k] = number of buckets holding exactly k elements (k >= 1).
  std::vector<std::uint64_t> load_histogram;
};

/// Exact census by bucketing all of S. Serial reference implementation;
/// kernels::census_parallel computes the same result.
CollisionCensus collision_census(const QuotientHashFn& h, std::span<const Key> keys, double threshold);

/// Census from bucket ids directly (shared by both census implementations).
CollisionCensus census_from_buckets(std::vector<std::uint64_t> buckets, double threshold);

struct WorkloadOp {
  enum class Kind : std::uint8_t { kInsert, kDelete };
  Kind kind;
  Key key;
};

struct OverflowTrace {
  /// Every insertion that found its bucket already at capacity, counting
  /// repeated insertions of the same key separately.
  std::uint64_t overflow_insertions = 0;
  /// Largest number of simultaneously live elements that were overflow
  /// elements at their own insertion time.
  std::uint64_t peak_live_overflow = 0;
  std::uint64_t final_live_overflow = 0;
  std::uint64_t peak_live = 0;
};

/// Replays inserts/deletes with per-bucket live loads. An insertion
/// overflows when its bucket already holds >= capacity live elements.
/// Throws DictError(kMalformedWorkload) on delete of an absent key or
/// insert of a live key.
OverflowTrace insertion_overflow_trace(const QuotientHashFn& h, std::span<const WorkloadOp> workload,
                                       std::uint64_t capacity);

/// Bound 2n^2/b + n^alpha for b >= n at threshold 2.
double census_bound_dense(std::uint64_t n, unsigned bucket_bits, double alpha);
/// Bound 2n e^{-delta^2 n/(3b)} + n^alpha for threshold (1+delta) n/b + 1.
double census_bound_sparse(std::uint64_t n, unsigned bucket_bits, double alpha, double delta);
double sparse_threshold(std::uint64_t n, unsigned bucket_bits, double delta);

}  // namespace qdict

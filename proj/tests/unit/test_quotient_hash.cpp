// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "qdict/error.hpp"
#include "qdict/quotient_hash.hpp"
#include "qdict/workload.hpp"

using namespace qdict;

namespace {

QuotientHashFn identity_fn(unsigned u, unsigned b, std::uint64_t n = 4) {
  Rng rng(0);
  return QuotientHashFn::sample(QhfParams{u, b, n, 0.95, 0.5, true}, rng);
}

QuotientHashFn sampled(unsigned u, unsigned b, std::uint64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return QuotientHashFn::sample(QhfParams{u, b, n, 0.95, 0.5, false}, rng);
}

// Two passes: bucket loads, then the elements in loaded buckets.
std::uint64_t recount(const QuotientHashFn& h, const std::vector<Key>& keys, double tau) {
  std::map<std::uint64_t, std::uint64_t> load;
  for (Key k : keys) ++load[h.bucket_of(k)];
  std::uint64_t count = 0;
  for (Key k : keys) count += static_cast<double>(load[h.bucket_of(k)]) >= tau;
  return count;
}

}  // namespace

TEST_CASE("identity layout examples (u = 16, b = 4)") {
  const auto h = identity_fn(4, 2);
  CHECK(h.eval(13) == BucketQuotient{3, 1});
  CHECK(h.eval(0) == BucketQuotient{0, 0});
  CHECK(h.eval(5) == BucketQuotient{1, 1});
  CHECK(h.eval(15) == BucketQuotient{3, 3});
  CHECK(h.invert(3, 1) == 13);
  CHECK(h.space_bits() == QuotientHashFn::kParamBits);
  CHECK(h.space().entries().size() == 1);
}

TEST_CASE("parameter validation and checked access") {
  Rng rng(1);
  CHECK_THROWS_AS(QuotientHashFn::sample(QhfParams{16, 17, 4}, rng), DictError);
  CHECK_THROWS_AS(QuotientHashFn::sample(QhfParams{8, 4, 1000}, rng), DictError);
  CHECK_THROWS_AS(QuotientHashFn::sample(QhfParams{16, 4, 4, 1.0}, rng), DictError);
  CHECK_THROWS_AS(QuotientHashFn::sample(QhfParams{16, 4, 4, 0.95, 0.0}, rng), DictError);
  const auto h = sampled(16, 6, 1024, 3);
  CHECK_THROWS_AS(h.eval_checked(1 << 16), DictError);
  CHECK_THROWS_AS(h.invert_checked(64, 0), DictError);
  CHECK_THROWS_AS(h.invert_checked(0, 1 << 10), DictError);
  CHECK(h.invert_checked(5, 7) == h.invert(5, 7));
}

TEST_CASE("same seed gives the same function") {
  const auto a = sampled(40, 14, 1 << 12, 99);
  const auto b = sampled(40, 14, 1 << 12, 99);
  Rng probe(5);
  for (int i = 0; i < 1000; ++i) {
    const Key x = probe.bits(40);
    CHECK(a.eval(x) == b.eval(x));
  }
}

TEST_CASE("exhaustive bijectivity on u = 2^16 across modes") {
  struct Case {
    unsigned b;
    std::uint64_t n;
  };
  // n < 256 (single affine map), b >= n grid, b < n grid with group permutations.
  for (const Case c : {Case{6, 64}, Case{6, 1024}, Case{12, 1024}, Case{4, 4096}, Case{16, 1 << 16}, Case{0, 512}}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto h = sampled(16, c.b, c.n, seed);
      std::vector<std::uint8_t> hit(1 << 16, 0);
      for (Key x = 0; x < (1 << 16); ++x) {
        const auto bq = h.eval(x);
        REQUIRE(bq.bucket < (1u << c.b));
        REQUIRE(bq.quotient < (1u << (16 - c.b)));
        REQUIRE(hit[(bq.bucket << (16 - c.b)) | bq.quotient]++ == 0);
        REQUIRE(h.invert(bq) == x);
      }
    }
  }
}

TEST_CASE("exhaustive inverse at u = 2^12 hits every key once") {
  const auto h = sampled(12, 5, 512, 4);
  std::vector<std::uint8_t> hit(1 << 12, 0);
  for (std::uint64_t b = 0; b < 32; ++b) {
    for (std::uint64_t q = 0; q < 128; ++q) {
      const Key x = h.invert(b, q);
      REQUIRE(x < (1u << 12));
      REQUIRE(hit[x]++ == 0);
      REQUIRE(h.eval(x) == BucketQuotient{b, q});
    }
  }
}

TEST_CASE("round trip at u = 2^64") {
  const auto h = sampled(64, 22, 1 << 20, 12);
  CHECK(h.uses_grid());
  Rng rng(6);
  for (int i = 0; i < 1'000'000; ++i) {
    const Key x = rng.next();
    const auto bq = h.eval(x);
    REQUIRE(bq.bucket < (1u << 22));
    REQUIRE(h.invert(bq) == x);
  }
}

TEST_CASE("representation size") {
  const auto h = sampled(20, 12, 1 << 10, 1);
  CHECK(h.space_bits() <= 1024 * 64);
  std::uint64_t sum = QuotientHashFn::kParamBits + h.reduction().space_bits() + h.shifts().space_bits();
  for (const auto& p : h.column_perms()) sum += p.space_bits();
  for (const auto& p : h.group_perms()) sum += p.space_bits();
  CHECK(h.space_bits() == sum);

  const auto g = sampled(20, 6, 1 << 12, 1);
  REQUIRE(!g.group_perms().empty());
  const std::uint64_t s = g.group_perms().front().size();
  CHECK(g.space().get("group_perms") >= g.group_perms().size() * s * ceil_log2(s));
  CHECK(sampled(20, 12, 64, 1).space().entries().size() == 2);  // params + reduction
}

TEST_CASE("census examples") {
  const auto h = identity_fn(4, 2);
  const std::vector<Key> same{0, 1, 2, 3}, spread{0, 4, 8, 12};
  CHECK(collision_census(h, same, 2).count == 4);
  CHECK(collision_census(h, spread, 2).count == 0);
  const auto c = collision_census(h, same, 2);
  CHECK(c.load_histogram.at(4) == 1);
}

TEST_CASE("census matches a two-pass recount") {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const auto h = sampled(24, 8, 2048, rep);
    const auto keys = distinct_keys(2048, 24, rng);
    for (double tau : {2.0, 5.0, 9.5, 13.0}) CHECK(collision_census(h, keys, tau).count == recount(h, keys, tau));
  }
}

TEST_CASE("overflow trace") {
  SUBCASE("insert-only workload equals the batch census") {
    Rng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
      const auto h = sampled(20, 10, 1024, rep);
      const auto keys = distinct_keys(1024, 20, rng);
      std::vector<WorkloadOp> ops;
      for (Key k : keys) ops.push_back({WorkloadOp::Kind::kInsert, k});
      const auto trace = insertion_overflow_trace(h, ops, 1);
      const auto census = collision_census(h, keys, 2);
      std::uint64_t loaded_buckets = 0;
      for (std::size_t l = 2; l < census.load_histogram.size(); ++l) loaded_buckets += census.load_histogram[l];
      CHECK(trace.overflow_insertions == census.count - loaded_buckets);
      CHECK(trace.peak_live_overflow == trace.overflow_insertions);
      CHECK(trace.final_live_overflow == trace.overflow_insertions);
      CHECK(trace.peak_live == 1024);
    }
  }
  SUBCASE("distinct buckets never overflow") {
    const auto h = identity_fn(4, 2);
    const std::vector<WorkloadOp> ops{{WorkloadOp::Kind::kInsert, 0}, {WorkloadOp::Kind::kInsert, 4},
                                      {WorkloadOp::Kind::kInsert, 8}, {WorkloadOp::Kind::kInsert, 12}};
    CHECK(insertion_overflow_trace(h, ops, 1).overflow_insertions == 0);
  }
  SUBCASE("repeated overfull insertions are counted separately") {
    const auto h = identity_fn(4, 2);
    using K = WorkloadOp::Kind;
    const std::vector<WorkloadOp> ops{{K::kInsert, 0}, {K::kInsert, 1}, {K::kDelete, 1}, {K::kInsert, 1}};
    const auto trace = insertion_overflow_trace(h, ops, 1);
    CHECK(trace.overflow_insertions == 2);
    CHECK(trace.peak_live_overflow == 1);
    CHECK(trace.final_live_overflow == 1);
  }
  SUBCASE("malformed workloads") {
    const auto h = identity_fn(4, 2);
    using K = WorkloadOp::Kind;
    CHECK_THROWS_AS(insertion_overflow_trace(h, std::vector<WorkloadOp>{{K::kDelete, 3}}, 1), DictError);
    CHECK_THROWS_AS(insertion_overflow_trace(h, std::vector<WorkloadOp>{{K::kInsert, 3}, {K::kInsert, 3}}, 1),
                    DictError);
  }
}

TEST_CASE("bound formulas") {
  CHECK(census_bound_dense(1024, 12, 0.95) == doctest::Approx(512 + std::pow(1024.0, 0.95)));
  CHECK(sparse_threshold(4096, 6, 0.5) == doctest::Approx(97.0));
  CHECK(census_bound_sparse(4096, 6, 0.95, 0.5) ==
        doctest::Approx(2 * 4096 * std::exp(-0.25 * 4096 / (3.0 * 64)) + std::pow(4096.0, 0.95)));
}

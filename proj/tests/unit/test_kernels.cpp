// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <vector>

#include "qdict/kernels.hpp"
#include "qdict/workload.hpp"

using namespace qdict;

TEST_CASE("parallel kernels agree with the serial reference") {
  Rng rng(31);
  const auto h = QuotientHashFn::sample(QhfParams{32, 20, 1 << 16}, rng);
  const auto keys = distinct_keys(1 << 16, 32, rng);
  std::vector<BucketQuotient> a(keys.size()), b(keys.size());
  kernels::eval_serial(h, keys, a);
  kernels::eval_parallel(h, keys, b);
  CHECK(a == b);
  for (std::size_t i = 0; i < keys.size(); i += 97) CHECK(a[i] == h.eval(keys[i]));

  for (double tau : {2.0, 3.0}) {
    const auto s = kernels::census_serial(h, keys, tau);
    const auto p = kernels::census_parallel(h, keys, tau);
    CHECK(s.count == p.count);
    CHECK(s.load_histogram == p.load_histogram);
    CHECK(s.count == collision_census(h, keys, tau).count);
  }
  // Wide bucket ids take the sorting path.
  const auto wide = QuotientHashFn::sample(QhfParams{40, 30, 1 << 16}, rng);
  const auto wide_keys = distinct_keys(1 << 16, 40, rng);
  CHECK(kernels::census_parallel(wide, wide_keys, 2).count == kernels::census_serial(wide, wide_keys, 2).count);
}

TEST_CASE("bijectivity kernels") {
  Rng rng(32);
  for (unsigned b : {3u, 9u, 14u}) {
    const auto h = QuotientHashFn::sample(QhfParams{18, b, 1 << 10}, rng);
    const auto s = kernels::check_bijective_serial(h);
    const auto p = kernels::check_bijective_parallel(h);
    CHECK(s.ok());
    CHECK(p.ok());
    CHECK(s.domain == (1u << 18));
    CHECK(p.domain == s.domain);
  }
}

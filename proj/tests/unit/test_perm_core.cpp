// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <numeric>
#include <vector>

#include "qdict/error.hpp"
#include "qdict/perm_core.hpp"

using namespace qdict;

namespace {

double chi_square_critical(double dof, double significance) {
  return boost::math::quantile(boost::math::chi_squared(dof), 1.0 - significance);
}

template <typename Counts>
double chi_square(const Counts& observed, double expected) {
  double stat = 0;
  for (auto o : observed) stat += (o - expected) * (o - expected) / expected;
  return stat;
}

}  // namespace

TEST_CASE("affine examples at k = 4") {
  const auto id = AffinePerm::from_coefficients(4, 1, 0);
  for (std::uint64_t x = 0; x < 16; ++x) CHECK(id.apply(x) == x);
  CHECK(AffinePerm::from_coefficients(4, 1, 5).apply(3) == 6);
  CHECK(AffinePerm::from_coefficients(4, 0b0010, 0).apply(0b1001) == 0b0001);
  CHECK(AffinePerm::from_coefficients(4, 0b0010, 0b0111).apply(0b1001) == 0b0110);
  CHECK(AffinePerm::from_coefficients(4, 0b0010, 0).invert(0b0001) == 0b1001);
  CHECK(id.invert(11) == 11);
  CHECK_THROWS_AS(AffinePerm::from_coefficients(4, 0, 3), DictError);
}

TEST_CASE("sampled affine permutations are bijections") {
  Rng rng(11);
  for (unsigned k : {1u, 4u, 9u, 16u}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto p = AffinePerm::sample(k, rng);
      CHECK(p.a() != 0);
      std::vector<std::uint8_t> seen(std::size_t{1} << k, 0);
      for (std::uint64_t x = 0; x < (1ull << k); ++x) {
        const auto y = p.apply(x);
        REQUIRE(y < (1ull << k));
        REQUIRE(seen[y]++ == 0);
        REQUIRE(p.invert(y) == x);
      }
    }
  }
  const auto wide = AffinePerm::sample(64, rng);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = rng.next();
    CHECK(wide.invert(wide.apply(x)) == x);
  }
  CHECK(AffinePerm::sample(7, rng).space_bits() == 21);
}

TEST_CASE("affine permutations are pairwise independent (chi-square, k = 8)") {
  const unsigned k = 8;
  const std::uint64_t x = 17, y = 200;
  const std::size_t samples = 1'000'000;
  std::vector<std::uint32_t> counts(256 * 256, 0);
  Rng rng(2024);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto p = AffinePerm::sample(k, rng);
    ++counts[p.apply(x) * 256 + p.apply(y)];
  }
  std::vector<std::uint32_t> distinct;
  for (std::uint64_t a = 0; a < 256; ++a) {
    CHECK(counts[a * 256 + a] == 0);
    for (std::uint64_t b = 0; b < 256; ++b) {
      if (a != b) distinct.push_back(counts[a * 256 + b]);
    }
  }
  const double expected = double(samples) / distinct.size();
  const double stat = chi_square(distinct, expected);
  CHECK(stat < chi_square_critical(distinct.size() - 1, 0.001));
}

TEST_CASE("shift family: range, determinism, uniformity") {
  Rng rng(5);
  const auto f = ShiftFamily::sample(8, 16, rng);
  const ShiftFamily g(f);
  std::vector<std::uint32_t> counts(256, 0);
  for (std::uint64_t row = 0; row < (1u << 16); ++row) {
    const auto s = f.shift_of_row(row);
    REQUIRE(s < f.columns());
    REQUIRE(g.shift_of_row(row) == s);
    ++counts[s];
  }
  CHECK(chi_square(counts, 256.0) < chi_square_critical(255, 0.001));
  const auto z = ShiftFamily::zero(8, 16);
  for (std::uint64_t row = 0; row < 100; ++row) CHECK(z.shift_of_row(row) == 0);
}

TEST_CASE("stored permutations") {
  Rng rng(8);
  const auto one = StoredPerm::sample(1, rng);
  CHECK(one.apply(0) == 0);
  for (std::uint64_t s : {2ull, 256ull, 65536ull}) {
    const auto p = StoredPerm::sample(s, rng);
    std::vector<std::uint32_t> images = p.forward();
    std::sort(images.begin(), images.end());
    std::vector<std::uint32_t> expect(s);
    std::iota(expect.begin(), expect.end(), 0u);
    CHECK(images == expect);
    for (std::uint64_t i = 0; i < s; ++i) REQUIRE(p.invert(p.apply(i)) == i);
    CHECK(p.space_bits() == 2 * s * ceil_log2(s));
  }
  CHECK_THROWS_AS(StoredPerm::from_table({0, 0}), DictError);
  CHECK(StoredPerm::from_table({1, 0}).invert(0) == 1);
}

TEST_CASE("stored permutation sampling is the documented Fisher-Yates") {
  Rng a(77), b(77);
  const auto p = StoredPerm::sample(64, a);
  std::vector<std::uint32_t> f(64);
  std::iota(f.begin(), f.end(), 0u);
  for (std::uint64_t i = 63; i > 0; --i) std::swap(f[i], f[b.below(i + 1)]);
  CHECK(p.forward() == f);
}

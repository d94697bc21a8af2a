// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "qdict/error.hpp"
#include "qdict/ph_dict.hpp"
#include "qdict/workload.hpp"

using namespace qdict;
using Mode = PhOnlyDict::Mode;

namespace {

PhOnlyParams params(std::uint64_t n, std::uint64_t t, unsigned u_bits) {
  PhOnlyParams p;
  p.n = n;
  p.t = t;
  p.universe_bits = u_bits;
  return p;
}

std::vector<Key> residents_of(const std::map<Key, Hashcode>& codes) {
  std::vector<Key> out;
  for (const auto& kv : codes) out.push_back(kv.first);
  return out;
}

}  // namespace

TEST_CASE("mode and bucket count") {
  Rng rng(1);
  PhOnlyDict composed(params(1 << 12, 1 << 12, 32), rng);
  CHECK(composed.mode() == Mode::kComposed);
  // 8 n^2 / (t + 1) = 2^27 / 4097, just under 2^15.
  CHECK(composed.bucket_bits() == 15);
  CHECK(composed.hash()->bucket_count() == (1u << 15));
  CHECK(composed.first()->params().n == (1u << 12));
  CHECK(composed.first()->params().t == (1u << 11));
  CHECK(composed.first()->params().universe_bits == 15);
  CHECK(composed.second()->params().n == (1u << 10));
  CHECK(composed.second_offset() == (1u << 12) + (1u << 11));

  PhOnlyDict relabel(params(1 << 12, 0, 32), rng);
  CHECK(relabel.mode() == Mode::kRelabel);
  CHECK(relabel.code_range() == (1u << 12));
  REQUIRE(relabel.inner() != nullptr);
  CHECK(relabel.inner()->mode() == Mode::kComposed);
  CHECK(relabel.inner()->params().t == (1u << 12));

  CHECK(PhOnlyDict(params(1 << 12, 64, 32), rng).mode() == Mode::kRelabel);
  CHECK(PhOnlyDict(params(1 << 12, 65, 32), rng).mode() == Mode::kComposed);
  // Bucket count is capped by u and floored at n.
  CHECK(PhOnlyDict(params(1 << 12, 1 << 12, 13), rng).bucket_bits() == 13);
  CHECK(PhOnlyDict(params(1 << 12, 1 << 16, 40), rng).bucket_bits() == 12);
  CHECK_THROWS_AS(PhOnlyDict(params(1 << 12, 0, 11), rng), DictError);
}

TEST_CASE("codes are distinct, in range and stable") {
  for (const auto& p : {params(1 << 12, 1 << 12, 32), params(1 << 12, 0, 32), params(1 << 12, 200, 24)}) {
    Rng rng(p.t + 11);
    PhOnlyDict d(p, rng);
    const auto keys = distinct_keys(p.n, p.universe_bits, rng);
    std::map<Key, Hashcode> codes;
    for (Key k : keys) codes[k] = d.insert(k);
    CHECK(d.size() == p.n);
    CHECK_THROWS_AS(d.insert(Key{1} << p.universe_bits), DictError);

    std::set<Hashcode> seen;
    std::uint64_t wrong = 0;
    for (const auto& [k, c] : codes) {
      seen.insert(c);
      wrong += c >= p.n + p.t || d.hashcode(k) != c;
    }
    CHECK(wrong == 0);
    CHECK(seen.size() == p.n);

    for (std::size_t i = 0; i < keys.size(); i += 2) d.erase(keys[i]);
    wrong = 0;
    for (std::size_t i = 1; i < keys.size(); i += 2) wrong += d.hashcode(keys[i]) != codes[keys[i]];
    CHECK(wrong == 0);
    CHECK(d.size() == p.n / 2);
  }
}

TEST_CASE("colliding keys go to the second structure") {
  Rng rng(2);
  PhOnlyDict d(params(1 << 12, 1 << 12, 32), rng);
  const auto& h = *d.hash();
  const Key a = h.invert(5, 0), b = h.invert(5, 1), c = h.invert(6, 0);
  const Hashcode ca = d.insert(a);
  CHECK(ca < d.second_offset());
  const Hashcode cb = d.insert(b);
  CHECK(cb >= d.second_offset());
  CHECK(cb < d.code_range());
  CHECK(d.insert(c) < d.second_offset());
  CHECK(d.second_routed() == 1);
  CHECK_THROWS_AS(d.insert(b), DictError);

  // b answers from second, a from first.
  CHECK(d.hashcode(a) == ca);
  CHECK(d.hashcode(b) == cb);
  d.erase(b);
  CHECK(d.hashcode(a) == ca);
  CHECK(d.second()->size() == 0);
  // Erasing a key of an occupied bucket drops the bucket entry.
  d.erase(a);
  CHECK_FALSE(d.find_code(a).has_value());
  CHECK_THROWS_AS(d.erase(a), DictError);
}

TEST_CASE("queries on non-resident keys stay in range and change nothing") {
  for (const auto& p : {params(1 << 10, 1 << 10, 32), params(1 << 10, 0, 32)}) {
    Rng rng(3);
    PhOnlyDict d(p, rng);
    const auto keys = distinct_keys(2 * p.n, p.universe_bits, rng);
    std::map<Key, Hashcode> codes;
    for (std::size_t i = 0; i < p.n; ++i) codes[keys[i]] = d.insert(keys[i]);
    std::uint64_t out = 0;
    for (std::size_t i = p.n; i < keys.size(); ++i) out += d.hashcode(keys[i]) >= p.n + p.t;
    CHECK(out == 0);
    std::uint64_t changed = 0;
    for (const auto& [k, c] : codes) changed += d.hashcode(k) != c;
    CHECK(changed == 0);
    CHECK(d.size() == p.n);
  }
}

TEST_CASE("full second structure requires a rebuild") {
  Rng rng(4);
  const auto p = params(1 << 12, 128, 32);
  PhOnlyDict d(p, rng);
  REQUIRE(d.mode() == Mode::kComposed);
  const std::uint64_t cap2 = d.second()->params().n;
  CHECK(cap2 == 32);

  std::vector<std::pair<Hashcode, Hashcode>> moves;
  d.set_relabel_observer([&](std::span<const std::pair<Hashcode, Hashcode>> m) {
    moves.insert(moves.end(), m.begin(), m.end());
  });
  const auto& h = *d.hash();
  std::map<Key, Hashcode> codes;
  for (std::uint64_t q = 0; q <= cap2; ++q) codes[h.invert(0, q)] = d.insert(h.invert(0, q));
  const Key blocked = h.invert(0, cap2 + 1);
  const auto space_before = d.space_bits();
  try {
    d.insert(blocked);
    FAIL("expected kRebuildRequired");
  } catch (const DictError& e) {
    CHECK(e.code() == Errc::kRebuildRequired);
  }
  CHECK(d.overflow_rebuilds() == 1);
  CHECK(d.size() == codes.size());
  CHECK_FALSE(d.second()->member(blocked));

  d.rebuild(residents_of(codes));
  CHECK(d.space_bits() == space_before);
  std::map<Hashcode, Hashcode> remap(moves.begin(), moves.end());
  CHECK(remap.size() == moves.size());
  std::set<Hashcode> seen;
  std::uint64_t wrong = 0;
  for (auto& [k, c] : codes) {
    const auto it = remap.find(c);
    const Hashcode expect = it == remap.end() ? c : it->second;
    wrong += d.hashcode(k) != expect;
    seen.insert(d.hashcode(k));
  }
  CHECK(wrong == 0);
  CHECK(seen.size() == codes.size());
  const Hashcode cb = d.insert(blocked);
  CHECK(cb < d.code_range());
  CHECK(!seen.contains(cb));
  CHECK_THROWS_AS(d.rebuild(std::vector<Key>{codes.begin()->first, 999999}), DictError);
}

TEST_CASE("relabel-mode rebuild keeps every code") {
  Rng rng(5);
  const auto p = params(1 << 12, 0, 32);
  PhOnlyDict d(p, rng);
  int events = 0;
  d.set_relabel_observer([&](auto) { ++events; });
  const auto keys = distinct_keys(p.n - 10, p.universe_bits, rng);
  std::map<Key, Hashcode> codes;
  for (Key k : keys) codes[k] = d.insert(k);
  d.rebuild(keys);
  std::uint64_t wrong = 0;
  for (const auto& [k, c] : codes) wrong += d.hashcode(k) != c;
  CHECK(wrong == 0);
  CHECK(events == 0);
  // Freed codes are still tracked after the rebuild.
  d.erase(keys[0]);
  const auto fresh = distinct_keys(20, p.universe_bits, rng);
  std::set<Hashcode> seen;
  for (const auto& [k, c] : codes) seen.insert(c);
  seen.erase(codes[keys[0]]);
  std::uint64_t added = 0, clashes = 0;
  for (Key k : fresh) {
    if (codes.contains(k) || added == 11) continue;
    const Hashcode c = d.insert(k);
    clashes += !seen.insert(c).second || c >= p.n;
    ++added;
  }
  CHECK(clashes == 0);
  CHECK(d.size() == p.n);
}

TEST_CASE("ledger composition") {
  Rng rng(6);
  PhOnlyDict composed(params(1 << 12, 1 << 12, 32), rng);
  CHECK(composed.space_bits() == composed.hash()->space_bits() + composed.first()->space_bits() +
                                     composed.second()->space_bits() + 192);
  PhOnlyDict relabel(params(1 << 12, 0, 32), rng);
  const std::uint64_t n = 1 << 12;
  const std::uint64_t map_bits = relabel.inner()->code_range() * width_for(n + 1);
  CHECK(relabel.space_bits() ==
        relabel.inner()->space_bits() + map_bits + CodeAllocator::layout_bits(n) + 192);
  CHECK(map_bits + CodeAllocator::layout_bits(n) + 192 <= 4 * n * 12);
}

TEST_CASE("space is fixed at construction; relabel fallback costs most") {
  const std::uint64_t n = 1 << 12;
  std::uint64_t relabel = 0, composed_max = 0;
  for (std::uint64_t t : {std::uint64_t{0}, std::uint64_t{64}, std::uint64_t{65}, std::uint64_t{512}, n}) {
    Rng rng(t);
    PhOnlyDict d(params(n, t, 32), rng);
    const auto empty = d.space_bits();
    for (Key k : distinct_keys(n, 32, rng)) d.insert(k);
    CHECK(d.space_bits() == empty);
    if (d.mode() == Mode::kRelabel) {
      relabel = std::max(relabel, empty);
    } else {
      composed_max = std::max(composed_max, empty);
    }
  }
  CHECK(relabel > composed_max);
}

TEST_CASE("verify harness on both modes") {
  for (std::uint64_t t : {0ull, 100ull, 4096ull}) {
    VerifyConfig cfg;
    cfg.kind = StructureKind::kPhOnly;
    cfg.n = 1 << 12;
    cfg.t = t;
    cfg.universe_bits = 32;
    cfg.ops = 200'000;
    cfg.seed = t + 1;
    const auto report = run_verify(cfg);
    INFO(report.summary());
    CHECK(report.ok());
  }
}

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>
#include <unordered_set>

#include "qdict/error.hpp"
#include "qdict/workload.hpp"

using namespace qdict;

TEST_CASE("kind names round-trip") {
  for (auto k : {StructureKind::kMembPh, StructureKind::kPhOnly, StructureKind::kRetrievalMemb,
                 StructureKind::kRetrievalPh, StructureKind::kQhf}) {
    CHECK(parse_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_kind("bloom").has_value());
}

TEST_CASE("churn workload keeps at most n live keys") {
  for (std::uint64_t n : {1ull, 7ull, 100ull}) {
    Rng rng(n);
    const auto ops = churn_workload(n, 12, 20'000, rng);
    CHECK(ops.size() == 20'000);
    std::unordered_set<Key> live;
    std::uint64_t bad = 0, peak = 0, inserts = 0;
    for (const auto& op : ops) {
      bad += op.key >= 4096;
      if (op.kind == WorkloadOp::Kind::kInsert) {
        bad += !live.insert(op.key).second;
        ++inserts;
      } else {
        bad += live.erase(op.key) != 1;
      }
      peak = std::max<std::uint64_t>(peak, live.size());
    }
    CHECK(bad == 0);
    CHECK(peak == n);
    if (n == 100) {
      CHECK(inserts > 9'000);
      CHECK(inserts < 11'000);
    }
  }
  Rng rng(1);
  CHECK_THROWS_AS(churn_workload(0, 12, 10, rng), DictError);
  CHECK_THROWS_AS(churn_workload(3000, 12, 10, rng), DictError);
}

TEST_CASE("distinct keys") {
  Rng rng(2);
  for (auto [n, u] : {std::pair{10ull, 4u}, std::pair{16ull, 4u}, std::pair{1000ull, 40u}, std::pair{5ull, 64u}}) {
    const auto keys = distinct_keys(n, u, rng);
    CHECK(keys.size() == n);
    CHECK(std::set<Key>(keys.begin(), keys.end()).size() == n);
    if (u < 64) {
      for (Key k : keys) CHECK(k < (Key{1} << u));
    }
  }
  CHECK_THROWS_AS(distinct_keys(17, 4, rng), DictError);
}

TEST_CASE("verify harness bookkeeping") {
  VerifyConfig cfg;
  cfg.n = 256;
  cfg.t = 256;
  cfg.universe_bits = 32;
  cfg.ops = 0;
  auto report = run_verify(cfg);
  CHECK(report.ok());
  CHECK(report.ops == 0);

  cfg.ops = 10'000;
  report = run_verify(cfg);
  CHECK(report.ok());
  CHECK(report.inserts + report.erases + report.queries == report.ops);
  CHECK(report.sweeps >= report.ops / cfg.n);
  CHECK(report.summary().find("discrepancies=0") != std::string::npos);

  // Same seed, same report.
  CHECK(run_verify(cfg).summary() == report.summary());

  cfg.kind = StructureKind::kQhf;
  CHECK_THROWS_AS(run_verify(cfg), DictError);
  cfg.kind = StructureKind::kMembPh;
  cfg.universe_bits = 8;
  CHECK_THROWS_AS(run_verify(cfg), DictError);
}

TEST_CASE("an injected fault is detected") {
  for (auto kind : {StructureKind::kMembPh, StructureKind::kPhOnly, StructureKind::kRetrievalMemb,
                    StructureKind::kRetrievalPh}) {
    VerifyConfig cfg;
    cfg.kind = kind;
    cfg.n = 256;
    cfg.t = 256;
    cfg.universe_bits = 32;
    cfg.ops = 20'000;
    cfg.inject_fault = true;
    const auto report = run_verify(cfg);
    INFO(to_string(kind));
    CHECK_FALSE(report.ok());
    CHECK(report.discrepancies == 1);
    CHECK_FALSE(report.first_discrepancy.empty());
  }
}

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdict/memb_ph_dict.hpp"
#include "qdict/quotient_hash.hpp"
#include "qdict/rng.hpp"

namespace qdict {

enum class StructureKind : std::uint8_t { kMembPh, kPhOnly, kRetrievalMemb, kRetrievalPh, kQhf };

std::string_view to_string(StructureKind kind) noexcept;
std::optional<StructureKind> parse_kind(std::string_view name) noexcept;

/// Random insert/delete sequence over [2^universe_bits] that never holds more
/// than n live keys. Inserts pick keys that are not live; deletes pick a
/// uniformly random live key. Insert probability is 1/2 strictly between
/// empty and full.
std::vector<WorkloadOp> churn_workload(std::uint64_t n, unsigned universe_bits, std::uint64_t ops, Rng& rng);

/// n distinct uniform keys from [2^universe_bits].
std::vector<Key> distinct_keys(std::uint64_t n, unsigned universe_bits, Rng& rng);

struct VerifyConfig {
  StructureKind kind = StructureKind::kMembPh;
  std::uint64_t n = 1024;
  std::uint64_t t = 1024;
  unsigned universe_bits = 20;
  unsigned payload_bits = 16;
  std::uint64_t ops = 0;
  std::uint64_t seed = 1;
  double c = 8.0;
  MembPhTunables tunables{};
  /// Test hook: corrupt the code recorded for one insertion halfway through.
  bool inject_fault = false;
};

struct VerifyReport {
  std::uint64_t ops = 0;
  std::uint64_t inserts = 0;
  std::uint64_t erases = 0;
  std::uint64_t queries = 0;
  std::uint64_t sweeps = 0;
  std::uint64_t relabel_events = 0;   // counted engine rebuilds that moved codes
  std::uint64_t forced_rebuilds = 0;  // ph-only kRebuildRequired handled by the harness
  std::uint64_t discrepancies = 0;
  std::string first_discrepancy;

  bool ok() const noexcept { return discrepancies == 0; }
  std::string summary() const;
};

/// Runs cfg.ops random operations against the structure and a shadow model
/// (key -> code, code -> key, key -> payload). Checks membership (where the
/// engine has it), code range [n + t], distinctness, stability across the
/// key's residency (codes may only move through a reported rebuild), and
/// payloads. A full sweep over all residents runs every n operations and at
/// the end. Throws DictError(kInvalidParams) for an unusable configuration.
VerifyReport run_verify(const VerifyConfig& cfg);

}  // namespace qdict

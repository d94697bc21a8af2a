// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdict/memb_ph_dict.hpp"
#include "qdict/workload.hpp"

namespace qdict::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiscrepancy = 1;
inline constexpr int kExitConfig = 2;
inline constexpr const char* kOutDirEnv = "QDICT_OUT_DIR";

struct RunConfig {
  std::string command;
  std::uint64_t n = 1024;
  std::vector<std::uint64_t> t_grid{1024};
  std::vector<unsigned> u_grid{20};  // lg u
  std::optional<unsigned> bucket_bits;
  StructureKind kind = StructureKind::kMembPh;
  std::uint64_t trials = 1;
  std::uint64_t ops = 0;
  std::uint64_t seed = 1;
  unsigned payload_bits = 16;
  double c = 8.0;
  MembPhTunables tunables{};
  bool identity = false;
  bool adversarial = false;
  bool inject_fault = false;
  std::string out;

  std::uint64_t t() const { return t_grid.front(); }
  unsigned universe_bits() const { return u_grid.front(); }
  /// Throws DictError(kInvalidParams).
  void validate() const;
};

/// "2^k" or a decimal integer.
std::optional<std::uint64_t> parse_count(std::string_view text);
/// "2^k" or a decimal power of two; returns k. "2^64" is accepted.
std::optional<unsigned> parse_pow2_bits(std::string_view text);
/// Applies one "--set name=value" override (c, c1, c2, c4, c5, alpha, delta).
/// Throws DictError(kInvalidParams).
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Per trial: sample h and S, census at tau = 2 and tau = (1 + delta) n/b + 1.
/// Columns: trial,seed,n,u,b,tau,count,bound.
std::string collisions_csv(const RunConfig& cfg);

struct SpacePoint {
  std::uint64_t t = 0;
  unsigned universe_bits = 0;
  std::uint64_t bits = 0;
};
/// Builds and fills one structure of cfg.kind; returns its ledger total.
SpacePoint measure_space(const RunConfig& cfg, std::uint64_t t, unsigned universe_bits, std::uint64_t seed);
/// One row per (u, t) grid point. Columns:
/// kind,n,t,u,r,bits,bits_per_key,lg_u_n,lglg_u_n,lg_n_t1.
std::string space_csv(const RunConfig& cfg);

/// Entry point of the qdict executable. Exit codes: 0 success,
/// 1 discrepancy found by verify, 2 configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdict::cli

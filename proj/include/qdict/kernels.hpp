// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qdict/quotient_hash.hpp"

// Data-parallel kernels over quotient hash functions. Each OpenMP kernel
// has a serial twin with identical results; the serial versions are the
// reference the tests compare against.
namespace qdict::kernels {

void eval_serial(const QuotientHashFn& h, std::span<const Key> keys, std::span<BucketQuotient> out);
void eval_parallel(const QuotientHashFn& h, std::span<const Key> keys, std::span<BucketQuotient> out);

struct BijectivityReport {
  std::uint64_t domain = 0;
  std::uint64_t duplicate_outputs = 0;  // outputs hit more than once
  std::uint64_t inverse_mismatches = 0; // x with invert(eval(x)) != x
  std::uint64_t out_of_range = 0;       // bucket >= b or quotient >= u/b
  bool ok() const noexcept { return duplicate_outputs == 0 && inverse_mismatches == 0 && out_of_range == 0; }
};

/// Exhaustive over all of [u]; requires lg u <= 32.
BijectivityReport check_bijective_serial(const QuotientHashFn& h);
BijectivityReport check_bijective_parallel(const QuotientHashFn& h);

CollisionCensus census_serial(const QuotientHashFn& h, std::span<const Key> keys, double threshold);
CollisionCensus census_parallel(const QuotientHashFn& h, std::span<const Key> keys, double threshold);

}  // namespace qdict::kernels

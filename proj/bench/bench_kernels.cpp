// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "qdict/kernels.hpp"
#include "qdict/workload.hpp"

namespace {

using namespace qdict;

QuotientHashFn make_hash(unsigned u_bits, unsigned b_bits, std::uint64_t n) {
  Rng rng(42);
  return QuotientHashFn::sample(QhfParams{u_bits, b_bits, n, 0.95, 0.5, false}, rng);
}

std::vector<Key> make_keys(std::uint64_t n, unsigned u_bits) {
  Rng rng(7);
  return distinct_keys(n, u_bits, rng);
}

template <auto Kernel>
void BM_Eval(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto h = make_hash(40, 20, n);
  const auto keys = make_keys(n, 40);
  std::vector<BucketQuotient> out(keys.size());
  for (auto _ : state) {
    Kernel(h, keys, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Kernel>
void BM_Census(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto h = make_hash(32, 16, n);
  const auto keys = make_keys(n, 32);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(h, keys, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Kernel>
void BM_Bijective(benchmark::State& state) {
  const auto u_bits = static_cast<unsigned>(state.range(0));
  const auto h = make_hash(u_bits, u_bits / 2, std::uint64_t{1} << (u_bits / 2));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(h));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << u_bits));
}

BENCHMARK(BM_Eval<kernels::eval_serial>)->Name("eval/serial")->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Eval<kernels::eval_parallel>)->Name("eval/parallel")->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Census<kernels::census_serial>)->Name("census/serial")->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Census<kernels::census_parallel>)->Name("census/parallel")->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_Bijective<kernels::check_bijective_serial>)->Name("bijective/serial")->Arg(16)->Arg(20)->UseRealTime();
BENCHMARK(BM_Bijective<kernels::check_bijective_parallel>)->Name("bijective/parallel")->Arg(16)->Arg(20)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();

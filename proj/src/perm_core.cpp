// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/perm_core.hpp"

#include <numeric>
#include <utility>

#include "qdict/error.hpp"
#include "qdict/gf2.hpp"

namespace qdict {

AffinePerm AffinePerm::sample(unsigned k, Rng& rng) {
  if (k == 0) return AffinePerm{};
  if (k > 64) throw DictError(Errc::kInvalidParams, "affine permutation width must be <= 64");
  const std::uint64_t b = rng.bits(k);
  std::uint64_t a = 0;
  while (a == 0) a = rng.bits(k);
  return from_coefficients(k, a, b);
}

AffinePerm AffinePerm::from_coefficients(unsigned k, std::uint64_t a, std::uint64_t b) {
  if (k > 64) throw DictError(Errc::kInvalidParams, "affine permutation width must be <= 64");
  AffinePerm p;
  p.k_ = k;
  if (k == 0) return p;
  if (a == 0 || a > low_mask(k) || b > low_mask(k)) {
    throw DictError(Errc::kInvalidParams, "affine coefficients out of field");
  }
  p.a_ = a;
  p.b_ = b;
  p.a_inv_ = gf2::inverse(a, k);
  return p;
}

std::uint64_t AffinePerm::apply(std::uint64_t x) const noexcept {
  assert(x <= low_mask(k_));
  if (k_ == 0) return 0;
  return gf2::mul(a_, x, k_) ^ b_;
}

std::uint64_t AffinePerm::invert(std::uint64_t y) const noexcept {
  assert(y <= low_mask(k_));
  if (k_ == 0) return 0;
  return gf2::mul(a_inv_, y ^ b_, k_);
}

void AffinePerm::serialize(BitWriter& out) const {
  out.put(a_, k_);
  out.put(b_, k_);
  out.put(a_inv_, k_);
}

ShiftFamily ShiftFamily::sample(unsigned column_bits, unsigned row_bits, Rng& rng) {
  const std::uint64_t lo = rng.next();
  const std::uint64_t hi = rng.next();
  return ShiftFamily(lo, hi, column_bits, row_bits);
}

ShiftFamily ShiftFamily::zero(unsigned column_bits, unsigned row_bits) {
  ShiftFamily f(0, 0, column_bits, row_bits);
  f.is_zero_ = true;
  return f;
}

void ShiftFamily::serialize(BitWriter& out) const {
  out.put(seed_lo_, 64);
  out.put(seed_hi_, 64);
}

StoredPerm StoredPerm::identity(std::uint64_t size) {
  if (size == 0 || !std::has_single_bit(size) || size > (std::uint64_t{1} << 31)) {
    throw DictError(Errc::kInvalidParams, "stored permutation size must be a power of two <= 2^31");
  }
  std::vector<std::uint32_t> forward(size);
  std::iota(forward.begin(), forward.end(), 0u);
  return from_table(std::move(forward));
}

StoredPerm StoredPerm::sample(std::uint64_t size, Rng& rng) {
  StoredPerm p = identity(size);
  auto& f = p.forward_;
  for (std::uint64_t i = size - 1; i > 0; --i) {
    std::swap(f[i], f[rng.below(i + 1)]);
  }
  for (std::uint64_t i = 0; i < size; ++i) p.inverse_[f[i]] = static_cast<std::uint32_t>(i);
  return p;
}

StoredPerm StoredPerm::from_table(std::vector<std::uint32_t> forward) {
  const std::uint64_t size = forward.size();
  if (size == 0 || !std::has_single_bit(size)) {
    throw DictError(Errc::kInvalidParams, "stored permutation size must be a power of two");
  }
  StoredPerm p;
  p.inverse_.assign(size, 0);
  std::vector<bool> seen(size, false);
  for (std::uint64_t i = 0; i < size; ++i) {
    if (forward[i] >= size || seen[forward[i]]) {
      throw DictError(Errc::kInvalidParams, "table is not a permutation");
    }
    seen[forward[i]] = true;
    p.inverse_[forward[i]] = static_cast<std::uint32_t>(i);
  }
  p.forward_ = std::move(forward);
  return p;
}

void StoredPerm::serialize(BitWriter& out) const {
  const unsigned w = ceil_log2(size());
  for (auto v : forward_) out.put(v, w);
  for (auto v : inverse_) out.put(v, w);
}

}  // namespace qdict

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/gf2.hpp"

#include <array>
#include <bit>

#include "qdict/bits.hpp"
#include "qdict/error.hpp"

namespace qdict::gf2 {
namespace {

// Multiplication modulo x^k + low without the table lookup.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t low, unsigned k) noexcept {
  const std::uint64_t top = std::uint64_t{1} << (k - 1);
  const std::uint64_t mask = low_mask(k);
  std::uint64_t acc = 0;
  while (b != 0) {
    if (b & 1) acc ^= a;
    b >>= 1;
    const bool carry = (a & top) != 0;
    a = (a << 1) & mask;
    if (carry) a ^= low;
  }
  return acc;
}

// Polynomial gcd over GF(2) for polynomials of degree <= 64, where the
// first argument may carry the implicit x^64 term via `a_high`.
unsigned degree(std::uint64_t p) { return p == 0 ? 0 : floor_log2(p); }

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  // m != 0, deg(m) < 64.
  const unsigned dm = degree(m);
  while (a != 0 && degree(a) >= dm) a ^= m << (degree(a) - dm);
  return a;
}

std::uint64_t poly_gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t r = poly_mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

std::array<std::uint64_t, 65> build_table() {
  std::array<std::uint64_t, 65> table{};
  table[0] = 0;
  table[1] = 1;  // x + 1
  for (unsigned k = 2; k <= 64; ++k) {
    // Constant term must be 1; scan odd candidates in increasing order.
    for (std::uint64_t low = 1;; low += 2) {
      if (is_irreducible(low, k)) {
        table[k] = low;
        break;
      }
    }
  }
  return table;
}

const std::array<std::uint64_t, 65>& table() {
  static const std::array<std::uint64_t, 65> t = build_table();
  return t;
}

}  // namespace

bool is_irreducible(std::uint64_t low, unsigned k) {
  if (k == 0 || k > 64) return false;
  if (k == 1) return true;
  if ((low & 1) == 0) return false;  // divisible by x
  // Ben-Or: f is irreducible iff gcd(x^(2^i) - x mod f, f) = 1 for
  // i = 1..k/2. Remainders have degree < k, so the gcd can start from
  // f mod r, which avoids materializing the x^k term when k = 64.
  std::uint64_t power = 2;  // x
  for (unsigned i = 1; i <= k / 2; ++i) {
    power = mul_mod(power, power, low, k);  // x^(2^i) mod f
    const std::uint64_t r = power ^ 2;      // minus x
    if (r == 0) return false;
    // f mod r: reduce x^k + low using x^k = (x^k mod r).
    std::uint64_t xk_mod_r = 1;
    for (unsigned j = 0; j < k; ++j) xk_mod_r = poly_mod(xk_mod_r << 1, r);
    const std::uint64_t f_mod_r = xk_mod_r ^ poly_mod(low, r);
    if (poly_gcd(r, f_mod_r) != 1) return false;
  }
  return true;
}

std::uint64_t modulus_low(unsigned k) {
  if (k == 0 || k > 64) throw DictError(Errc::kInvalidParams, "field degree must be in [1, 64]");
  return table()[k];
}

std::uint64_t mul(std::uint64_t a, std::uint64_t b, unsigned k) noexcept {
  if (k == 1) return a & b;
  return mul_mod(a, b, table()[k], k);
}

std::uint64_t inverse(std::uint64_t a, unsigned k) {
  if (a == 0) throw DictError(Errc::kInvalidParams, "zero has no inverse");
  if (k == 1) return 1;
  // a^(2^k - 2) = a^2 * a^4 * ... * a^(2^(k-1)).
  std::uint64_t result = 1;
  std::uint64_t sq = a;
  for (unsigned i = 1; i < k; ++i) {
    sq = mul(sq, sq, k);
    result = mul(result, sq, k);
  }
  return result;
}

}  // namespace qdict::gf2

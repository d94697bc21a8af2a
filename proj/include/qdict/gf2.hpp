// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

// Arithmetic in the binary field GF(2^k), 1 <= k <= 64. Elements are the
// k-bit integers; bit i is the coefficient of x^i. Each degree uses the
// lexicographically least irreducible polynomial of that degree as modulus.
namespace qdict::gf2 {

/// Low k bits of the modulus (the x^k term is implicit).
std::uint64_t modulus_low(unsigned k);

/// Product a*b reduced modulo the degree-k modulus. a, b < 2^k.
std::uint64_t mul(std::uint64_t a, std::uint64_t b, unsigned k) noexcept;

/// Multiplicative inverse of a nonzero element.
std::uint64_t inverse(std::uint64_t a, unsigned k);

/// True iff x^k + low is irreducible over GF(2) (Ben-Or test).
bool is_irreducible(std::uint64_t low, unsigned k);

}  // namespace qdict::gf2

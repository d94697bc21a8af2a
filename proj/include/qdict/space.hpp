// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdict {

/// Named bit counts for the components of a structure. Entries keep their
/// first-insertion order so printed ledgers are stable.
class SpaceLedger {
 public:
  void add(std::string_view component, std::uint64_t bits);
  /// Throws DictError(kUnderflow) if the entry would go negative.
  void subtract(std::string_view component, std::uint64_t bits);
  /// Adds every entry of `other` under `prefix.`.
  void merge(std::string_view prefix, const SpaceLedger& other);

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t get(std::string_view component) const;
  const std::vector<std::pair<std::string, std::uint64_t>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::uint64_t>> entries_;
  std::uint64_t total_ = 0;
};

/// Memory model: an unbounded array of 64-bit cells, initially blank (zero).
/// Space in use is the shortest prefix containing every nonblank cell.
class ArenaModel {
 public:
  static constexpr unsigned kWordBits = 64;
  static constexpr std::uint64_t kBlank = 0;

  void write(std::uint64_t addr, std::uint64_t word);
  void blank(std::uint64_t addr) { write(addr, kBlank); }
  std::uint64_t read(std::uint64_t addr) const;
  std::uint64_t space_words() const noexcept;
  std::size_t nonblank_cells() const noexcept { return cells_.size(); }

 private:
  std::map<std::uint64_t, std::uint64_t> cells_;  // nonblank cells only
};

}  // namespace qdict

// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/space.hpp"

#include <algorithm>

#include "qdict/error.hpp"

namespace qdict {

void SpaceLedger::add(std::string_view component, std::uint64_t bits) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == component; });
  if (it == entries_.end()) {
    entries_.emplace_back(std::string(component), bits);
  } else {
    it->second += bits;
  }
  total_ += bits;
}

void SpaceLedger::subtract(std::string_view component, std::uint64_t bits) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == component; });
  const std::uint64_t have = it == entries_.end() ? 0 : it->second;
  if (bits > have) {
    throw DictError(Errc::kUnderflow, "ledger entry '" + std::string(component) + "' would go negative");
  }
  if (it != entries_.end()) it->second -= bits;
  total_ -= bits;
}

void SpaceLedger::merge(std::string_view prefix, const SpaceLedger& other) {
  for (const auto& [name, bits] : other.entries_) {
    add(std::string(prefix) + "." + name, bits);
  }
}

std::uint64_t SpaceLedger::get(std::string_view component) const {
  for (const auto& [name, bits] : entries_) {
    if (name == component) return bits;
  }
  return 0;
}

void ArenaModel::write(std::uint64_t addr, std::uint64_t word) {
  if (word == kBlank) {
    cells_.erase(addr);
  } else {
    cells_[addr] = word;
  }
}

std::uint64_t ArenaModel::read(std::uint64_t addr) const {
  auto it = cells_.find(addr);
  return it == cells_.end() ? kBlank : it->second;
}

std::uint64_t ArenaModel::space_words() const noexcept {
  return cells_.empty() ? 0 : cells_.rbegin()->first + 1;
}

}  // namespace qdict

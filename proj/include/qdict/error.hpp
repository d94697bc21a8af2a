// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qdict {

enum class Errc {
  kInvalidParams,
  kOutOfDomain,
  kDuplicateKey,
  kNotResident,
  kCapacityExceeded,
  kAllocatorExhausted,
  kDoubleFree,
  kUnderflow,
  kRebuildRequired,
  kMalformedWorkload,
};

const char* to_string(Errc code);

/// Contract violation reported by any dictionary or hash component.
class DictError : public std::runtime_error {
 public:
  DictError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidParams: return "invalid parameters";
    case Errc::kOutOfDomain: return "out of domain";
    case Errc::kDuplicateKey: return "duplicate key";
    case Errc::kNotResident: return "key not resident";
    case Errc::kCapacityExceeded: return "capacity exceeded";
    case Errc::kAllocatorExhausted: return "allocator exhausted";
    case Errc::kDoubleFree: return "double free";
    case Errc::kUnderflow: return "underflow";
    case Errc::kRebuildRequired: return "rebuild required";
    case Errc::kMalformedWorkload: return "malformed workload";
  }
  return "unknown";
}

}  // namespace qdict

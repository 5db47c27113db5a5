#pragma once

#include <cstdint>

namespace pfpm {

using DatasetId = std::uint32_t;
using PhraseId = std::uint32_t;

inline constexpr DatasetId kMergedDataset = 0xFFFFFFFFu;

// Parsing parameters. Every artifact records them in its header and only
// artifacts with identical parameters may be combined.
struct ParseParams {
  std::uint32_t w = 20;
  std::uint64_t p = 100;
  std::uint64_t hash_base = 1000000007;
  std::uint64_t hash_mod = 1999999973;

  void validate() const;

  friend bool operator==(const ParseParams&, const ParseParams&) = default;
};

// Throws ParamMismatch naming `what` when the two differ.
void require_same_params(const ParseParams& expected, const ParseParams& actual,
                         const char* what);

}  // namespace pfpm

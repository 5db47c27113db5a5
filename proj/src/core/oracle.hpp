#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "params.hpp"
#include "text_normalize.hpp"

namespace pfpm::oracle {

inline constexpr std::uint64_t kDefaultMaxLength = 1'000'000;

// Multi-string BWT of the padded strings s 0x2^w of all datasets, taken in
// (dataset, string) order. Each string ends with its own separator, ranked
// above 0x2, below the letters, and by string order among separators. The
// character preceding the first position of a string is 0x2. Refuses inputs
// whose padded length exceeds max_length.
std::string naive_multi_bwt(const std::vector<SequenceCollection>& datasets, std::uint32_t w,
                            std::uint64_t max_length = kDefaultMaxLength);

// Same result via comparison sorting; for tiny inputs only.
std::string quadratic_multi_bwt(const std::vector<SequenceCollection>& datasets,
                                std::uint32_t w);

// Hash of one window recomputed from the polynomial definition.
std::uint64_t window_hash(std::string_view window, const ParseParams& params);

struct WindowHit {
  std::uint64_t position = 0;
  std::string window;
};

// Every full window of `text` whose hash is 0 mod p.
std::vector<WindowHit> naive_window_scan(std::string_view text, const ParseParams& params);

}  // namespace pfpm::oracle

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pfpm {

// Suffix array by induced sorting (SA-IS) over an integer alphabet. The text
// must end with a unique symbol 0 and every symbol must be < alphabet_size.
// The returned array includes the sentinel suffix at rank 0.
std::vector<std::uint64_t> suffix_array(std::span<const std::uint32_t> text,
                                        std::uint32_t alphabet_size);

}  // namespace pfpm

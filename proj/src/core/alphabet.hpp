#pragma once

#include <array>
#include <cstdint>

namespace pfpm {

// Storage symbols. Sequence text uses A C G T X only; the three sentinels are
// reserved for dictionary and padding structure.
inline constexpr std::uint8_t kEndOfDict = 0x00;
inline constexpr std::uint8_t kEndOfPhrase = 0x01;
inline constexpr std::uint8_t kSeparator = 0x02;

inline constexpr std::uint8_t kInvalidCode = 0xFF;
inline constexpr unsigned kCodeBits = 3;

// 3-bit codes follow byte order: 0x0 < 0x1 < 0x2 < A < C < G < T < X.
inline constexpr std::array<std::uint8_t, 8> kCodeToSymbol = {
    kEndOfDict, kEndOfPhrase, kSeparator, 'A', 'C', 'G', 'T', 'X'};

constexpr std::uint8_t storage_code(std::uint8_t c) noexcept {
  switch (c) {
    case kEndOfDict: return 0;
    case kEndOfPhrase: return 1;
    case kSeparator: return 2;
    case 'A': return 3;
    case 'C': return 4;
    case 'G': return 5;
    case 'T': return 6;
    case 'X': return 7;
    default: return kInvalidCode;
  }
}

constexpr std::uint8_t storage_symbol(std::uint8_t code) noexcept {
  return kCodeToSymbol[code & 7u];
}

constexpr bool is_text_symbol(std::uint8_t c) noexcept {
  return c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == 'X';
}

}  // namespace pfpm

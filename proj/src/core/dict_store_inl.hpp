#pragma once

#include "alphabet.hpp"
#include "binary_io.hpp"
#include "error.hpp"

namespace pfpm {

template <class Fn>
void DictionaryReader::for_each_symbol(Fn&& fn) {
  const std::uint64_t symbols = info_.d_size + 1;
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<char> buf(kChunk);
  if (!info_.packed) {
    std::uint64_t left = symbols;
    while (left > 0) {
      const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, kChunk));
      read_exact(in_, std::span<char>(buf.data(), n), path_ + " dictionary text");
      for (std::size_t i = 0; i < n; ++i) fn(static_cast<std::uint8_t>(buf[i]));
      left -= n;
    }
    return;
  }
  std::uint64_t left_bytes = PackedDictionary::byte_length(symbols);
  std::uint64_t emitted = 0;
  std::uint32_t acc = 0;
  unsigned acc_bits = 0;
  while (left_bytes > 0) {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left_bytes, kChunk));
    read_exact(in_, std::span<char>(buf.data(), n), path_ + " packed dictionary");
    for (std::size_t i = 0; i < n; ++i) {
      acc = (acc << 8) | static_cast<std::uint8_t>(buf[i]);
      acc_bits += 8;
      while (acc_bits >= kCodeBits && emitted < symbols) {
        acc_bits -= kCodeBits;
        fn(storage_symbol(static_cast<std::uint8_t>((acc >> acc_bits) & 7u)));
        ++emitted;
      }
      acc &= (1u << acc_bits) - 1;
    }
    left_bytes -= n;
  }
}

}  // namespace pfpm

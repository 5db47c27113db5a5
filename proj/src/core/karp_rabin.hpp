#pragma once

#include <cstdint>
#include <span>

#include "params.hpp"

namespace pfpm {

// Polynomial rolling hash H(c1..cw) = sum ci * B^(w-i) mod M over raw byte
// values. A window is a trigger candidate when H mod p == 0.
class KarpRabin {
 public:
  explicit KarpRabin(const ParseParams& params);

  std::uint64_t from_scratch(std::span<const std::uint8_t> window) const;

  // Shifts a full-window hash by one character.
  std::uint64_t roll(std::uint64_t state, std::uint8_t outgoing,
                     std::uint8_t incoming) const noexcept {
    const std::uint64_t drop = mulmod(outgoing, top_power_);
    std::uint64_t h = state >= drop ? state - drop : state + mod_ - drop;
    return addmod(mulmod(h, base_), incoming % mod_);
  }

  bool is_trigger(std::uint64_t hash) const noexcept { return hash % p_ == 0; }

  std::uint32_t window() const noexcept { return w_; }

 private:
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % mod_);
  }
  std::uint64_t addmod(std::uint64_t a, std::uint64_t b) const noexcept {
    const std::uint64_t s = a + b;
    return (s >= mod_ || s < a) ? s - mod_ : s;
  }

  std::uint32_t w_;
  std::uint64_t p_;
  std::uint64_t base_;
  std::uint64_t mod_;
  std::uint64_t top_power_;  // B^(w-1) mod M
};

}  // namespace pfpm

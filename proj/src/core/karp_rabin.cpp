#include "karp_rabin.hpp"

#include "error.hpp"

namespace pfpm {

KarpRabin::KarpRabin(const ParseParams& params)
    : w_(params.w),
      p_(params.p),
      base_(params.hash_base),
      mod_(params.hash_mod),
      top_power_(1) {
  params.validate();
  for (std::uint32_t i = 1; i < w_; ++i) top_power_ = mulmod(top_power_, base_);
}

std::uint64_t KarpRabin::from_scratch(
    std::span<const std::uint8_t> window) const {
  if (window.size() != w_)
    fail(ErrorKind::InvalidArgument, "hash window has the wrong length");
  std::uint64_t h = 0;
  for (std::uint8_t c : window) h = addmod(mulmod(h, base_), c % mod_);
  return h;
}

}  // namespace pfpm

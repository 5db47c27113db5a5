#include "params.hpp"

#include <string>

#include "error.hpp"

namespace pfpm {

void ParseParams::validate() const {
  if (w < 2) fail(ErrorKind::InvalidArgument, "window length w must be >= 2");
  if (p < 1) fail(ErrorKind::InvalidArgument, "modulus p must be >= 1");
  if (hash_mod < 2) fail(ErrorKind::InvalidArgument, "hash modulus must be >= 2");
  if (hash_base == 0 || hash_base >= hash_mod)
    fail(ErrorKind::InvalidArgument, "hash base must lie in [1, hash modulus)");
}

void require_same_params(const ParseParams& expected, const ParseParams& actual,
                         const char* what) {
  if (expected == actual) return;
  fail(ErrorKind::ParamMismatch,
       std::string(what) + ": parameters (w=" + std::to_string(actual.w) +
           ", p=" + std::to_string(actual.p) +
           ", base=" + std::to_string(actual.hash_base) +
           ", mod=" + std::to_string(actual.hash_mod) + ") differ from (w=" +
           std::to_string(expected.w) + ", p=" + std::to_string(expected.p) +
           ", base=" + std::to_string(expected.hash_base) +
           ", mod=" + std::to_string(expected.hash_mod) + ")");
}

}  // namespace pfpm

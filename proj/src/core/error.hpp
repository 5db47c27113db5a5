#pragma once

#include <stdexcept>
#include <string>

namespace pfpm {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Format,
  ParamMismatch,
  Invariant,
  Limit,
};

// All failures raised by the core carry a kind so the C API can map them to
// status codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pfpm

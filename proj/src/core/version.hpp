#pragma once

namespace pfpm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pfpm

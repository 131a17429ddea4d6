#pragma once

namespace brwx {

inline constexpr const char* kVersion = "brwx 0.1.0";

}  // namespace brwx

#pragma once

namespace softbound {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace softbound

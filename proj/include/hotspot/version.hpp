#pragma once

namespace hotspot {

inline constexpr const char* kToolName = "hotspot";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hotspot

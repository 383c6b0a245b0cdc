#pragma once

namespace curvtest {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "curvtest";

}  // namespace curvtest

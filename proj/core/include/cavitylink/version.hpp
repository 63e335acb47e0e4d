#pragma once

namespace cavitylink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cavitylink

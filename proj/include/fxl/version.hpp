#pragma once

namespace fxl {

inline constexpr const char* kVersion = "1.0.0";

} // namespace fxl

#pragma once

namespace mpsg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mpsg

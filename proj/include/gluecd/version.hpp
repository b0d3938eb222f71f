#pragma once

namespace gluecd {
inline constexpr const char* kVersion = "0.1.0";
}

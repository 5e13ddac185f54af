#pragma once

namespace spinsync {
inline constexpr const char* kVersion = "0.1.0";
}

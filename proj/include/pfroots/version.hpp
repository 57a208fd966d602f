#pragma once

namespace pfroots {
inline constexpr const char* version = "0.1.0";
}

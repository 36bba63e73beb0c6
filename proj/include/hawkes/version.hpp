#pragma once

namespace hawkes {

inline constexpr const char* version_string = "1.0.0";
inline constexpr int output_format_version = 1;

}  // namespace hawkes

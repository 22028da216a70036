#pragma once

#include <string_view>

namespace sentinel {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace sentinel

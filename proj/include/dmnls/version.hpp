#pragma once

#include <string_view>

namespace dmnls {

inline constexpr std::string_view library_name = "dmnls";
inline constexpr std::string_view library_version = "0.1.0";

} // namespace dmnls

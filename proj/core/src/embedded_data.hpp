#pragma once

#include <string_view>

namespace ansigen::detail {

// Data files compiled into the library (see core/data/).
std::string_view embedded_catalog();
std::string_view embedded_schema();

}  // namespace ansigen::detail

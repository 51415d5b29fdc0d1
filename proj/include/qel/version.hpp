#pragma once

namespace qel {

inline constexpr const char* version = "0.1.0";

}  // namespace qel

#pragma once

namespace wpgd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wpgd

#pragma once

namespace mpsedge {

inline constexpr const char* version = "0.1.0";

} // namespace mpsedge

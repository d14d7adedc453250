#pragma once

namespace spinshell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spinshell

#pragma once

namespace fdgcl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fdgcl

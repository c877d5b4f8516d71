#pragma once

namespace qread {

inline constexpr const char* kToolVersion = "qread 0.1.0";

}  // namespace qread

#pragma once

namespace lopsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lopsim

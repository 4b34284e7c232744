#pragma once

namespace dida {

inline constexpr const char* kVersion = "0.1.0";

} // namespace dida

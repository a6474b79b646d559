#pragma once

namespace mudae {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mudae

#pragma once

namespace subemb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace subemb

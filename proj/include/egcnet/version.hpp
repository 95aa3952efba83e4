#pragma once

namespace egcnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace egcnet

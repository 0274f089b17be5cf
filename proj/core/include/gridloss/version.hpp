#pragma once

namespace gridloss {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gridloss

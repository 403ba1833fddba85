#pragma once

namespace uihp {
inline constexpr const char* version = "0.1.0";
}

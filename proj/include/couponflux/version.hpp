#pragma once

namespace couponflux {

inline constexpr const char* kToolVersion = "couponflux 1.0.0";

}

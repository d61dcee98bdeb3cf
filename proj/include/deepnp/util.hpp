#pragma once

#include <algorithm>
#include <cmath>

namespace deepnp {

// Nearest integer, ties upward: 0.5 -> 1. Hard decisions and the scheduled
// redundancy budget both use this tie rule.
inline double round_half_up(double x) {
    return std::floor(x + 0.5);
}

inline double clamp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace deepnp

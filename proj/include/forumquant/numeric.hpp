#pragma once

#include <cmath>
#include <limits>

namespace fq {

// Time-series cells that cannot be computed hold a quiet NaN.
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

inline bool is_defined(double x) { return !std::isnan(x); }

}  // namespace fq

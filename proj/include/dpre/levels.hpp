#ifndef DPRE_LEVELS_HPP
#define DPRE_LEVELS_HPP

// Energy levels E_N = c * N^alpha and the natural gap scale
// delta_N = sqrt(pi/2) * exp(E_N^2 / 2) * (2d)^(-N), the reciprocal of the
// expected number of paths per unit window at the level.

#include <cmath>
#include <limits>

#include "dpre/errors.hpp"

namespace dpre {

struct LevelSpec {
    double c = 0.0;
    double alpha = 0.0;
};

inline double level_value(const LevelSpec& spec, int n) {
    return spec.c * std::pow(static_cast<double>(n), spec.alpha);
}

inline double log_delta_n(int d, int n, double e_level) {
    return 0.5 * std::log(1.5707963267948966) + 0.5 * e_level * e_level -
           static_cast<double>(n) * std::log(2.0 * d);
}

// Computed in log space; refuses to return a subnormal (the gap scale would
// lose precision silently).
inline double delta_n(int d, int n, double e_level) {
    if (d < 1 || n < 1) throw ConfigError("delta_n: need d >= 1, n >= 1");
    const double ld = log_delta_n(d, n, e_level);
    if (ld < std::log(std::numeric_limits<double>::min()))
        throw ConfigError("delta_n underflows to subnormal at this (d, n, E)");
    return std::exp(ld);
}

} // namespace dpre

#endif

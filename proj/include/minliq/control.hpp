#pragma once

#include <cmath>

namespace minliq {

// Optimal trading rate for marginal value u at position q:
//   v* = -(p-1) vol |u|^(p-1) sgn(u) q,  with sgn(0) = 0.
inline double optimal_rate(double u, double q, double p, double vol) {
    if (u == 0.0) return 0.0;
    const double mag = (p == 2.0) ? std::abs(u) : std::pow(std::abs(u), p - 1.0);
    return -(p - 1.0) * vol * mag * (u > 0.0 ? 1.0 : -1.0) * q;
}

inline double optimal_rate_1d(double u, double q, double p, double vol) {
    return optimal_rate(u, q, p, vol);
}

inline double optimal_rate_sv(double u, double q, double p, double vol_at_state) {
    return optimal_rate(u, q, p, vol_at_state);
}

}  // namespace minliq

#pragma once

#include <cmath>
#include <limits>

#include "minliq/errors.hpp"

namespace minliq {

// Exact flow of dv/dtau = -a |v|^p over a backward time step h (tau = T - t).
// Positive values decay like (v^(1-p) + (p-1) a h)^(-1/(p-1)), so +inf maps to
// the blow-up profile; negative values grow in magnitude and explode when the
// bracket reaches zero, which only happens if the lower bound assumption fails.
inline double react(double v, double a, double h, double p) {
    if (a == 0.0 || h == 0.0 || v == 0.0) return v;
    const double ah = a * h;
    if (p == 2.0) {
        if (std::isinf(v)) {
            if (v > 0.0) return 1.0 / ah;
            throw AssumptionViolated("K^(p-1)(p-1)T*vol_bar < 1", "value is -inf");
        }
        const double d = 1.0 + ah * v;
        if (!(d > 0.0))
            throw AssumptionViolated("K^(p-1)(p-1)T*vol_bar < 1", "negative part exploded");
        return v / d;
    }
    const double q = p - 1.0;
    if (v > 0.0) return std::pow(std::pow(v, -q) + q * ah, -1.0 / q);
    const double bracket = std::pow(-v, -q) - q * ah;
    if (!(bracket > 0.0))
        throw AssumptionViolated("K^(p-1)(p-1)T*vol_bar < 1", "negative part exploded");
    return -std::pow(bracket, -1.0 / q);
}

}  // namespace minliq

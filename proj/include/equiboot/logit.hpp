#pragma once

#include <algorithm>
#include <cmath>

namespace equiboot {

// log(1 + e^t) without overflow for large |t|.
inline double log1pexp(double t) {
    return std::log1p(std::exp(-std::abs(t))) + std::max(t, 0.0);
}

// sigma(t) = 1 / (1 + e^{-t}), evaluated from the side that cannot overflow.
inline double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace equiboot

#pragma once

// Log-space arithmetic helpers. Rare-event quantities routinely live around
// exp(-600) and the convention throughout is: compute in log space, convert to
// linear only when the value is representable.

#include <cmath>
#include <limits>

namespace couponflux {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Linear-space values smaller than this are flushed to zero; callers that need
// smaller scales must stay in log space.
inline constexpr double kLinearFloor = 1e-300;
inline const double kLogLinearFloor = std::log(kLinearFloor);

// log(exp(a) + exp(b)) without overflow. -inf is the additive identity.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// log(exp(a) - exp(b)); requires a >= b. Equal inputs give -inf.
inline double log_sub(double a, double b) {
    if (b == kNegInf) return a;
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

// exp with the flush-to-zero convention above.
inline double from_log(double lx) {
    if (lx < kLogLinearFloor) return 0.0;
    return std::exp(lx);
}

inline double log_from_linear(double x) {
    return x > 0.0 ? std::log(x) : kNegInf;
}

// Relative discrepancy of two log-space values, measured in log units.
// Both -inf counts as exact agreement.
inline double log_gap(double a, double b) {
    if (a == kNegInf && b == kNegInf) return 0.0;
    return std::fabs(a - b);
}

}

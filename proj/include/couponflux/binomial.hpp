#pragma once

// Binomial probability masses via logarithmic coefficients. Direct factorial
// ratios overflow past n = 170; the kernels here go to n = 2000.

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "qseries.hpp"

namespace couponflux {

inline double log_binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) throw DomainError("binomial coefficient needs 0 <= k <= n");
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

// pmf of Binomial(m, q) as a length m+1 vector.
inline std::vector<double> binomial_pmf(int m, double q) {
    if (m < 0) throw DomainError("binomial pmf needs m >= 0");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("binomial pmf needs q in [0,1]");
    std::vector<double> out(static_cast<std::size_t>(m) + 1, 0.0);
    if (m == 0) {
        out[0] = 1.0;
        return out;
    }
    if (q == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (q == 1.0) {
        out[static_cast<std::size_t>(m)] = 1.0;
        return out;
    }
    double lq = std::log(q), lp = std::log1p(-q);
    double total = 0.0;
    for (int j = 0; j <= m; ++j) {
        double lv = log_binomial_coefficient(m, j) + j * lq + (m - j) * lp;
        double v = from_log(lv);
        out[static_cast<std::size_t>(j)] = v;
        total += v;
    }
    // Renormalize away the log-gamma rounding so downstream row-sum checks at
    // 1e-12 hold even for m near 2000.
    for (auto& v : out) v /= total;
    return out;
}

}

#pragma once

// Log-space special functions shared by the model modules: finite and infinite
// q-Pochhammer products, lucky-climb weight tables, the stationary law of the
// limiting infinite count chain, and a checked log-gamma.

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "logspace.hpp"

namespace couponflux {

// log (a;a)_m = sum_{r=1}^m log(1 - a^r).
inline double log_q_pochhammer(double a, long long m) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("q-Pochhammer base must lie in (0,1)");
    if (m < 0) throw DomainError("finite q-Pochhammer needs m >= 0");
    double acc = 0.0;
    double ar = 1.0;
    for (long long r = 1; r <= m; ++r) {
        ar *= a;
        acc += std::log1p(-ar);
    }
    return acc;
}

// log (a;a)_inf. Factors approach 1 geometrically; stop once a factor moves
// the sum by less than 1e-17, which keeps every downstream 1e-10 tolerance
// comfortable.
inline double log_q_pochhammer_inf(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("q-Pochhammer base must lie in (0,1)");
    double acc = 0.0;
    double ar = 1.0;
    for (;;) {
        ar *= a;
        double term = std::log1p(-ar);
        if (std::fabs(term) < 1e-17) break;
        acc += term;
    }
    return acc;
}

// log w_{n,k} = log[(n)_k / n^k] + k log Q + (k(k+1)/2) log S.
// The falling factorial is summed in logs; factorial ratios overflow past
// n = 170 and are never formed.
inline double log_lucky_weight(int n, int k, double survival, double refresh) {
    if (k < 0 || k > n) throw DomainError("lucky weight needs 0 <= k <= n");
    if (!(survival > 0.0 && survival < 1.0)) throw DomainError("survival must lie in (0,1)");
    if (!(refresh > 0.0 && refresh <= 1.0)) throw DomainError("refresh must lie in (0,1]");
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += std::log(static_cast<double>(n - j));
    acc -= static_cast<double>(k) * std::log(static_cast<double>(n));
    acc += static_cast<double>(k) * std::log(refresh);
    acc += 0.5 * static_cast<double>(k) * static_cast<double>(k + 1) * std::log(survival);
    return acc;
}

struct LuckyWeightTable {
    int n;
    double survival;
    double refresh;
    std::vector<double> log_w;  // indices 0..n
};

// Built by the one-step recursion w_{k+1} = w_k * ((n-k)/n) * Q * S^{k+1},
// starting from w_0 = 1. Tests cross-check against the closed form above.
inline LuckyWeightTable make_lucky_weight_table(int n, double survival, double refresh) {
    if (n < 0) throw DomainError("table needs n >= 0");
    if (!(survival > 0.0 && survival < 1.0)) throw DomainError("survival must lie in (0,1)");
    if (!(refresh > 0.0 && refresh <= 1.0)) throw DomainError("refresh must lie in (0,1]");
    LuckyWeightTable t{n, survival, refresh, std::vector<double>(static_cast<std::size_t>(n) + 1)};
    t.log_w[0] = 0.0;
    double log_s = std::log(survival), log_q = std::log(refresh);
    for (int k = 0; k < n; ++k) {
        t.log_w[static_cast<std::size_t>(k) + 1] =
            t.log_w[static_cast<std::size_t>(k)] +
            std::log(static_cast<double>(n - k) / static_cast<double>(n)) + log_q +
            static_cast<double>(k + 1) * log_s;
    }
    return t;
}

// Stationary law of the limiting count chain: the count is a sum of
// independent Bernoulli(Q S^r) indicators, r = 1, 2, .... Computed by exact
// convolution; parameters below 1e-18 are dropped, which perturbs the law by
// less than their sum. Returns pi(0..kmax).
inline std::vector<double> infinite_chain_stationary(double survival, double refresh, int kmax) {
    if (kmax < 0) throw DomainError("kmax must be nonnegative");
    if (!(survival > 0.0 && survival < 1.0)) throw DomainError("survival must lie in (0,1)");
    if (!(refresh >= 0.0 && refresh <= 1.0)) throw DomainError("refresh must lie in [0,1]");

    std::vector<double> dist{1.0};
    double p = refresh;
    for (;;) {
        p *= survival;  // Q * S^r at step r
        if (p < 1e-18) break;
        dist.push_back(0.0);
        for (std::size_t k = dist.size() - 1; k >= 1; --k)
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        dist[0] *= 1.0 - p;
    }

    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (std::size_t k = 0; k < out.size() && k < dist.size(); ++k) out[k] = dist[k];
    return out;
}

inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma needs x > 0");
    return std::lgamma(x);
}

}

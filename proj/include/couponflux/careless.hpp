#pragma once

// Careless collector, post-loss convention: each step draws one coupon
// uniformly, adds it to the collection, then every held coupon is
// independently lost with probability p; completion is checked after the loss
// step. The held count is a Markov chain whose row k mixes Binomial(k, q) and
// Binomial(k+1, q) masses. Completion is a deep rare event: the stationary
// mass at n scales like q^{n(n+1)/2}, hence the log-space plumbing.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "binomial.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "logspace.hpp"
#include "qseries.hpp"
#include "rng.hpp"

namespace couponflux {

struct CarelessParams {
    int n;
    double q;  // per-step retention probability of each held coupon

    CarelessParams(int n_, double q_) : n(n_), q(q_) {
        if (n < 1) throw DomainError("need n >= 1");
        if (!(q > 0.0 && q < 1.0)) throw DomainError("retention probability must lie in (0,1)");
    }

    double p() const { return 1.0 - q; }
};

// Row k = (k/n) Binomial(k, q) + ((n-k)/n) Binomial(k+1, q): with probability
// k/n the drawn coupon was already held (k survival trials), otherwise it is
// new (k+1 trials).
inline CountKernel careless_kernel(const CarelessParams& par) {
    const int n = par.n;
    const double q = par.q;
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    std::vector<double> rows(N * N, 0.0);
    for (int k = 0; k <= n; ++k) {
        auto row = rows.begin() + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(N);
        double w_old = static_cast<double>(k) / n;
        if (w_old > 0.0) {
            std::vector<double> b = binomial_pmf(k, q);
            for (int j = 0; j <= k; ++j) row[j] += w_old * b[static_cast<std::size_t>(j)];
        }
        double w_new = static_cast<double>(n - k) / n;
        if (w_new > 0.0) {
            std::vector<double> b = binomial_pmf(k + 1, q);
            for (int j = 0; j <= k + 1; ++j) row[j] += w_new * b[static_cast<std::size_t>(j)];
        }
    }
    return CountKernel(n, std::move(rows));
}

inline TargetSet careless_completion_target(const CarelessParams& par) {
    return TargetSet({par.n});
}

// log of the sharp asymptotic completion flux
// (q;q)_inf^{-1} n!/n^n q^{n(n+1)/2}.
inline double careless_log_flux_asymptotic(const CarelessParams& par) {
    const int n = par.n;
    const double q = par.q;
    return -log_q_pochhammer_inf(q) + log_gamma(n + 1.0) - n * std::log(static_cast<double>(n)) +
           0.5 * static_cast<double>(n) * static_cast<double>(n + 1) * std::log(q);
}

// Exact flux through both stationary identities plus the asymptotic. The two
// exact routes are nu(n)(1 - q^n) and nu(n-1) q^n / n; log_exact carries the
// first, log_exact_alt the second.
inline FluxReport careless_flux(const CarelessParams& par) {
    if (par.n > 2000) throw DomainError("exact solve capped at n = 2000");
    CountKernel K = careless_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    const int n = par.n;
    const double q = par.q;

    double log_exact = nu.log_prob(static_cast<std::size_t>(n)) + std::log1p(-std::pow(q, n));
    double log_alt = nu.log_prob(static_cast<std::size_t>(n) - 1) + n * std::log(q) -
                     std::log(static_cast<double>(n));
    double log_pred = careless_log_flux_asymptotic(par);
    return FluxReport{log_exact, log_alt, log_pred, log_exact - log_pred};
}

// Upward cut rate out of {0..k}: u_k = ((n-k)/n) q^{k+1}. The stationary flux
// across the cut satisfies nu(k) u_k = sum_{j>k} nu(j) P(j, {0..k}).
inline double careless_log_cut_rate(const CarelessParams& par, int k) {
    if (k < 0 || k >= par.n) throw DomainError("cut level needs 0 <= k < n");
    return std::log(static_cast<double>(par.n - k) / par.n) + (k + 1) * std::log(par.q);
}

struct TailRatioProfile {
    std::vector<int> k_range;  // levels with representable stationary mass
    std::vector<double> a;     // a_k = nu(k) / w_{n,k}
    double limit_constant;     // 1 / (q;q)_inf

    // max_{k >= m, k in range} |log a_k - log a_m|; shrinks as m grows.
    double flatness(int m) const {
        std::size_t i0 = 0;
        while (i0 < k_range.size() && k_range[i0] < m) ++i0;
        if (i0 >= k_range.size()) throw DomainError("flatness base beyond representable range");
        double base = std::log(a[i0]);
        double worst = 0.0;
        for (std::size_t i = i0; i < a.size(); ++i)
            worst = std::max(worst, std::fabs(std::log(a[i]) - base));
        return worst;
    }
};

// Ratios of the stationary law to the lucky-climb weights, over every level
// whose stationary mass is representable. Deeper levels underflow the linear
// floor and are omitted rather than reported as zero ratios.
inline TailRatioProfile tail_ratio_profile(const CarelessParams& par, int k_min = 0) {
    if (par.n > 2000) throw DomainError("exact solve capped at n = 2000");
    if (k_min < 0 || k_min > par.n) throw DomainError("k_min outside state space");
    CountKernel K = careless_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    LuckyWeightTable w = make_lucky_weight_table(par.n, par.q, 1.0);

    TailRatioProfile prof;
    prof.limit_constant = std::exp(-log_q_pochhammer_inf(par.q));
    for (int k = k_min; k <= par.n; ++k) {
        double lp = nu.log_prob(static_cast<std::size_t>(k));
        if (lp == kNegInf) break;
        prof.k_range.push_back(k);
        prof.a.push_back(std::exp(lp - w.log_w[static_cast<std::size_t>(k)]));
    }
    return prof;
}

// max_{j <= j_max} |nu_n(j) - pi(j)| against the infinite-chain limit law.
inline double local_convergence_check(const CarelessParams& par, int j_max) {
    if (j_max < 0 || j_max > par.n) throw DomainError("j_max outside state space");
    CountKernel K = careless_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    std::vector<double> pi = infinite_chain_stationary(par.q, 1.0, j_max);
    double worst = 0.0;
    for (int j = 0; j <= j_max; ++j)
        worst = std::max(worst, std::fabs(nu.probs[static_cast<std::size_t>(j)] -
                                          pi[static_cast<std::size_t>(j)]));
    return worst;
}

struct MarginalComparison {
    double log_true_scale;      // -log of the asymptotic completion flux
    double log_marginal_scale;  // n log(1/q*) from the independent-marginal heuristic
    double gap;                 // log_true_scale - log_marginal_scale
};

// The mean-field heuristic treats coupons as independent with per-coupon
// presence q* = q/(q + np); it underestimates the completion time scale, and
// the gap grows like (n^2/2) log(1/q).
inline MarginalComparison marginal_heuristic_comparison(const CarelessParams& par) {
    double q_star = par.q / (par.q + par.n * par.p());
    double log_true = -careless_log_flux_asymptotic(par);
    double log_marginal = par.n * std::log(1.0 / q_star);
    return MarginalComparison{log_true, log_marginal, log_true - log_marginal};
}

inline double careless_mixing_bound(int n, double q, long long t) {
    if (n < 1 || t < 0) throw DomainError("need n >= 1, t >= 0");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
    double v = n * std::pow(q, static_cast<double>(t));
    return v < 1.0 ? v : 1.0;
}

// Hitting-time sample from the empty start, counting steps, completion
// checked post-loss. budget = 0 means unlimited; a positive budget throws
// BudgetExceeded when reached so callers can mark the sample censored.
//
// Draw consumption per step:
//   q = 1/2 and n <= 32: one u64; high 32 bits select the coupon, the low n
//     bits are the per-coupon survival mask. The vectorized engine implements
//     exactly this contract, so the two paths agree sample for sample.
//   otherwise: one u64 for the coupon, then one u64 per held coupon in
//     increasing index order for the survival trials.
inline std::uint64_t simulate_careless_one(const CarelessParams& par, Xoshiro256pp& rng,
                                           std::uint64_t budget = 0) {
    const int n = par.n;
    const double q = par.q;

    if (q == 0.5 && n <= 32) {
        const std::uint64_t full = (1ull << n) - 1;
        std::uint64_t have = 0, t = 0;
        for (;;) {
            std::uint64_t r = rng.next();
            ++t;
            have |= 1ull << (((r >> 32) * static_cast<std::uint64_t>(n)) >> 32);
            have &= r & full;
            if (have == full) return t;
            if (budget != 0 && t >= budget) throw BudgetExceeded("careless sample hit step budget");
        }
    }

    const std::uint32_t survive_threshold = [&] {
        double v = q * 4294967296.0;
        return v < 4294967295.0 ? static_cast<std::uint32_t>(v + 0.5) : 4294967295u;
    }();
    std::vector<std::uint64_t> have(static_cast<std::size_t>((n + 63) / 64), 0);
    std::uint64_t t = 0;
    for (;;) {
        std::uint64_t r = rng.next();
        ++t;
        std::uint32_t j = static_cast<std::uint32_t>(((r >> 32) * static_cast<std::uint64_t>(n)) >> 32);
        have[j >> 6] |= 1ull << (j & 63u);
        int count = 0;
        for (std::size_t w = 0; w < have.size(); ++w) {
            std::uint64_t word = have[w];
            while (word) {
                int b = __builtin_ctzll(word);
                word &= word - 1;
                if (static_cast<std::uint32_t>(rng.next() >> 32) < survive_threshold) {
                    ++count;
                } else {
                    have[w] &= ~(1ull << b);
                }
            }
        }
        if (count == n) return t;
        if (budget != 0 && t >= budget) throw BudgetExceeded("careless sample hit step budget");
    }
}

inline std::uint64_t simulate_careless(const CarelessParams& par, std::uint64_t seed,
                                       std::uint64_t budget = 0) {
    Xoshiro256pp rng = stream_rng(seed, 0);
    return simulate_careless_one(par, rng, budget);
}

}

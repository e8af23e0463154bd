#pragma once

// Combined collector: each step selects a coupon uniformly and refreshes it to
// present with probability Q = 1-alpha (the clumsy part), then every present
// coupon is independently retained with probability S = 1-beta (the careless
// part). Completion is checked after the thinning step. At alpha = 0 the count
// kernel coincides with the careless kernel at q = S, because
// Bin(m, S) convolved with Bern(S) is Bin(m+1, S).

#include <cmath>
#include <cstdint>
#include <vector>

#include "binomial.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "logspace.hpp"
#include "qseries.hpp"
#include "rng.hpp"

namespace couponflux {

struct CombinedParams {
    int n;
    double alpha;
    double beta;

    CombinedParams(int n_, double alpha_, double beta_) : n(n_), alpha(alpha_), beta(beta_) {
        if (n < 1) throw DomainError("need n >= 1");
        if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0,1)");
        // beta = 0 is a genuine singularity of the model, not a limit point.
        if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1) strictly");
    }

    double Q() const { return 1.0 - alpha; }
    double S() const { return 1.0 - beta; }
};

// Row k = (k/n) [Bin(k-1,S) + Bern(QS)] + ((n-k)/n) [Bin(k,S) + Bern(QS)]
// (sums meaning convolution; the first branch is absent at k = 0).
inline CountKernel combined_kernel(const CombinedParams& par) {
    const int n = par.n;
    const double Q = par.Q(), S = par.S();
    const double qs = Q * S;
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    std::vector<double> rows(N * N, 0.0);

    auto add_branch = [&](std::vector<double>::iterator row, double weight, int m) {
        // weight * (Bin(m, S) convolved with Bern(QS))
        if (weight <= 0.0) return;
        std::vector<double> b = binomial_pmf(m, S);
        for (int j = 0; j <= m; ++j) {
            double mass = weight * b[static_cast<std::size_t>(j)];
            row[j] += mass * (1.0 - qs);
            row[j + 1] += mass * qs;
        }
    };

    for (int k = 0; k <= n; ++k) {
        auto row = rows.begin() + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(N);
        if (k >= 1) add_branch(row, static_cast<double>(k) / n, k - 1);
        add_branch(row, static_cast<double>(n - k) / n, k);
    }
    return CountKernel(n, std::move(rows));
}

inline TargetSet combined_completion_target(const CombinedParams& par) {
    return TargetSet({par.n});
}

// log of the asymptotic completion flux (S;S)_inf^{-1} n!/n^n Q^n S^{n(n+1)/2}.
inline double combined_log_flux_asymptotic(const CombinedParams& par) {
    const int n = par.n;
    return -log_q_pochhammer_inf(par.S()) + log_gamma(n + 1.0) -
           n * std::log(static_cast<double>(n)) + n * std::log(par.Q()) +
           0.5 * static_cast<double>(n) * static_cast<double>(n + 1) * std::log(par.S());
}

// Exact flux nu(n)(1 - Q S^n), the cut-based entry flux as an independent
// exact route, and the asymptotic prediction.
inline FluxReport combined_flux(const CombinedParams& par) {
    if (par.n > 2000) throw DomainError("exact solve capped at n = 2000");
    CountKernel K = combined_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    const int n = par.n;

    double log_exact = nu.log_prob(static_cast<std::size_t>(n)) +
                       std::log1p(-par.Q() * std::pow(par.S(), n));
    double log_alt = entry_flux(K, nu, combined_completion_target(par));
    double log_pred = combined_log_flux_asymptotic(par);
    return FluxReport{log_exact, log_alt, log_pred, log_exact - log_pred};
}

// Upward cut rate u_k = ((n-k)/n) Q S^{k+1}.
inline double combined_log_cut_rate(const CombinedParams& par, int k) {
    if (k < 0 || k >= par.n) throw DomainError("cut level needs 0 <= k < n");
    return std::log(static_cast<double>(par.n - k) / par.n) + std::log(par.Q()) +
           (k + 1) * std::log(par.S());
}

inline double combined_mixing_bound(int n, double S, long long t) {
    if (n < 1 || t < 0) throw DomainError("need n >= 1, t >= 0");
    if (!(S > 0.0 && S < 1.0)) throw DomainError("S must lie in (0,1)");
    double v = n * std::pow(S, static_cast<double>(t));
    return v < 1.0 ? v : 1.0;
}

struct SingularityReport {
    double log_mu_asym;     // combined asymptotic flux at the probed point
    double log_clumsy_flux; // alpha (1-alpha)^n, the clumsy scale at p = alpha
    double log_factor_gap;  // difference of the two
};

// Probes the beta -> 0 boundary: the (S;S)_inf factor blows up the combined
// asymptotic while the clumsy scale at the same alpha stays put, so the two
// separate by an unbounded factor. Non-removability of the beta = 0 boundary
// is asserted downstream as |log_factor_gap| > 3 log 10.
inline SingularityReport singularity_check(const CombinedParams& par) {
    double log_mu = combined_log_flux_asymptotic(par);
    double log_clumsy = std::log(par.alpha) + par.n * std::log1p(-par.alpha);
    return SingularityReport{log_mu, log_clumsy, log_mu - log_clumsy};
}

// Hitting-time sample from the empty start, completion checked post-thinning.
// budget = 0 means unlimited; a positive budget throws BudgetExceeded.
//
// Draw consumption per step:
//   S = 1/2 and n <= 32: two u64. First: high 32 bits select the coupon, low
//     n bits are the retention mask for the other coupons. Second: high 32
//     bits decide the selected coupon's post-thinning state (one Bern(QS)
//     coin; its pre-step state is irrelevant). The vectorized engine
//     implements exactly this contract.
//   otherwise: one u64 for the coupon and its refresh coin, then one u64 per
//     present coupon in increasing index order for the retention trials.
inline std::uint64_t simulate_combined_one(const CombinedParams& par, Xoshiro256pp& rng,
                                           std::uint64_t budget = 0) {
    const int n = par.n;
    const double Q = par.Q(), S = par.S();

    auto coin_threshold = [](double prob) {
        double v = prob * 4294967296.0;
        return v < 4294967295.0 ? static_cast<std::uint32_t>(v + 0.5) : 4294967295u;
    };

    if (S == 0.5 && n <= 32) {
        const std::uint64_t full = (1ull << n) - 1;
        const std::uint32_t qs_threshold = coin_threshold(Q * S);
        std::uint64_t have = 0, t = 0;
        for (;;) {
            std::uint64_t r1 = rng.next();
            std::uint64_t r2 = rng.next();
            ++t;
            std::uint64_t bit = 1ull << (((r1 >> 32) * static_cast<std::uint64_t>(n)) >> 32);
            have = ((have & ~bit) & r1 & full) |
                   (static_cast<std::uint32_t>(r2 >> 32) < qs_threshold ? bit : 0ull);
            if (have == full) return t;
            if (budget != 0 && t >= budget) throw BudgetExceeded("combined sample hit step budget");
        }
    }

    const std::uint32_t refresh_threshold = coin_threshold(Q);
    const std::uint32_t retain_threshold = coin_threshold(S);
    std::vector<std::uint64_t> have(static_cast<std::size_t>((n + 63) / 64), 0);
    std::uint64_t t = 0;
    for (;;) {
        std::uint64_t r = rng.next();
        ++t;
        std::uint32_t j = static_cast<std::uint32_t>(((r >> 32) * static_cast<std::uint64_t>(n)) >> 32);
        std::uint64_t jbit = 1ull << (j & 63u);
        if (static_cast<std::uint32_t>(r) < refresh_threshold)
            have[j >> 6] |= jbit;
        else
            have[j >> 6] &= ~jbit;
        int count = 0;
        for (std::size_t w = 0; w < have.size(); ++w) {
            std::uint64_t word = have[w];
            while (word) {
                int b = __builtin_ctzll(word);
                word &= word - 1;
                if (static_cast<std::uint32_t>(rng.next() >> 32) < retain_threshold) {
                    ++count;
                } else {
                    have[w] &= ~(1ull << b);
                }
            }
        }
        if (count == n) return t;
        if (budget != 0 && t >= budget) throw BudgetExceeded("combined sample hit step budget");
    }
}

inline std::uint64_t simulate_combined(const CombinedParams& par, std::uint64_t seed,
                                       std::uint64_t budget = 0) {
    Xoshiro256pp rng = stream_rng(seed, 0);
    return simulate_combined_one(par, rng, budget);
}

}

#pragma once

// Clumsy collector: each step selects a coupon uniformly and refreshes its
// state to present with probability q = 1-p, absent with probability p. The
// number of absent coupons is a birth-death chain; completion means absent
// count 0. Stationary absent-count is Binomial(n, p) and the completion flux
// is p q^n exactly.

#include <cmath>
#include <cstdint>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "logspace.hpp"
#include "rng.hpp"

namespace couponflux {

struct ClumsyParams {
    int n;
    double p;

    ClumsyParams(int n_, double p_) : n(n_), p(p_) {
        if (n < 1) throw DomainError("need n >= 1");
        if (!(p > 0.0 && p < 1.0)) throw DomainError("loss probability must lie in (0,1)");
    }

    double q() const { return 1.0 - p; }
};

// Birth-death kernel on the absent count k: up with probability (n-k)p/n,
// down with probability kq/n, hold otherwise.
inline CountKernel clumsy_count_kernel(const ClumsyParams& par) {
    const int n = par.n;
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    std::vector<double> rows(N * N, 0.0);
    for (int k = 0; k <= n; ++k) {
        double up = static_cast<double>(n - k) * par.p / n;
        double down = static_cast<double>(k) * par.q() / n;
        auto row = rows.begin() + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(N);
        if (k + 1 <= n) row[k + 1] = up;
        if (k - 1 >= 0) row[k - 1] = down;
        row[k] = 1.0 - up - down;
    }
    return CountKernel(n, std::move(rows));
}

inline TargetSet clumsy_completion_target() { return TargetSet({0}); }

// Exact entry flux into completion vs the closed form p q^n.
inline FluxReport clumsy_flux(const ClumsyParams& par) {
    CountKernel K = clumsy_count_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    double log_exact = entry_flux(K, nu, clumsy_completion_target());
    double log_pred = std::log(par.p) + par.n * std::log(par.q());
    return FluxReport{log_exact, log_exact, log_pred, log_exact - log_pred};
}

// One hitting-time sample from the all-absent start. Presence lives in a
// packed bitmask with a maintained absent count, so each step is O(1) even
// though hitting times reach 2^n. Per step one u64: high 32 bits select the
// coupon, low 32 bits decide the refreshed state.
inline std::uint64_t simulate_clumsy_one(const ClumsyParams& par, Xoshiro256pp& rng) {
    const int n = par.n;
    const std::uint32_t present_threshold = [&] {
        double t = par.q() * 4294967296.0;
        return t < 4294967295.0 ? static_cast<std::uint32_t>(t + 0.5) : 4294967295u;
    }();

    std::uint64_t t = 0;
    if (n <= 64) {
        const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
        std::uint64_t present = 0;
        for (;;) {
            std::uint64_t r = rng.next();
            ++t;
            std::uint64_t bit = 1ull
                                << (((r >> 32) * static_cast<std::uint64_t>(n)) >> 32);
            if (static_cast<std::uint32_t>(r) < present_threshold)
                present |= bit;
            else
                present &= ~bit;
            if (present == full) return t;
        }
    }

    std::vector<std::uint64_t> present(static_cast<std::size_t>((n + 63) / 64), 0);
    int absent = n;
    for (;;) {
        std::uint64_t r = rng.next();
        ++t;
        std::uint32_t j = static_cast<std::uint32_t>(((r >> 32) * static_cast<std::uint64_t>(n)) >> 32);
        std::uint64_t bit = 1ull << (j & 63u);
        std::uint64_t& word = present[j >> 6];
        bool was = word & bit;
        bool now = static_cast<std::uint32_t>(r) < present_threshold;
        if (now) word |= bit; else word &= ~bit;
        absent += static_cast<int>(was) - static_cast<int>(now);
        if (absent == 0) return t;
    }
}

inline std::uint64_t simulate_clumsy(const ClumsyParams& par, std::uint64_t seed) {
    Xoshiro256pp rng = stream_rng(seed, 0);
    return simulate_clumsy_one(par, rng);
}

// Sample i draws from counter stream (seed, i).
inline std::vector<std::uint64_t> simulate_clumsy_batch(const ClumsyParams& par,
                                                        std::uint64_t seed, std::size_t count) {
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        Xoshiro256pp rng = stream_rng(seed, i);
        out[i] = simulate_clumsy_one(par, rng);
    }
    return out;
}

// Coupling bound on distance to stationarity after t selections.
inline double clumsy_mixing_bound(int n, long long t) {
    if (n < 1 || t < 0) throw DomainError("need n >= 1, t >= 0");
    double v = n * std::pow(1.0 - 1.0 / static_cast<double>(n), static_cast<double>(t));
    return v < 1.0 ? v : 1.0;
}

}

#pragma once

// Reset-button collector: one extra "reset" coupon with probability rho wipes
// the collection; we study the first completion time T of the n standard
// coupons. Closed forms (success probability, PGF, mean), two simulators, and
// the scaling-regime normalizations live here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "logspace.hpp"
#include "qseries.hpp"
#include "rng.hpp"

namespace couponflux {

struct ResetParams {
    int n;
    double rho;
    std::vector<double> weights;  // empty = equal weights (1-rho)/n each

    ResetParams(int n_, double rho_, std::vector<double> w = {})
        : n(n_), rho(rho_), weights(std::move(w)) {
        if (n < 1) throw DomainError("need at least one standard coupon");
        if (!(rho > 0.0 && rho < 1.0)) throw DomainError("reset probability must lie in (0,1)");
        if (!weights.empty()) {
            if (static_cast<int>(weights.size()) != n)
                throw LengthMismatch("weight count does not match n");
            double s = 0.0;
            for (double w_ : weights) {
                if (!(w_ > 0.0)) throw DomainError("weights must be positive");
                s += w_;
            }
            if (std::fabs(s - (1.0 - rho)) > 1e-12)
                throw DomainError("weights must sum to 1 - rho");
        }
    }

    bool equal_weights() const { return weights.empty(); }
    double q() const { return 1.0 - rho; }
};

// PGF of the reset-free completion time C of an equal-weight collector,
// phi(x) = prod_{j=1}^n ((j/n) x) / (1 - (1 - j/n) x), and its logarithmic
// derivative x phi'(x)/phi(x) = sum_j 1/(1 - (1 - j/n) x).
enum class PgfMode { value, log_derivative };

inline double uniform_pgf(int n, double x, PgfMode mode) {
    if (n < 1) throw DomainError("need n >= 1");
    if (!(x >= 0.0)) throw DomainError("pgf argument must be nonnegative");
    if (mode == PgfMode::value) {
        if (x == 0.0) return 0.0;
        double acc = 1.0;
        for (int j = 1; j <= n; ++j) {
            double denom = 1.0 - (1.0 - static_cast<double>(j) / n) * x;
            // Tilted evaluations approach the smallest pole; refuse once the
            // factor loses all relative accuracy instead of extrapolating.
            if (denom < 1e-12) throw PoleError("pgf factor denominator below 1e-12");
            acc *= (static_cast<double>(j) / n) * x / denom;
        }
        return acc;
    }
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        double denom = 1.0 - (1.0 - static_cast<double>(j) / n) * x;
        if (denom < 1e-12) throw PoleError("pgf factor denominator below 1e-12");
        acc += 1.0 / denom;
    }
    return acc;
}

// Probability that an excursion completes before any reset. Equal weights use
// the gamma-ratio closed form with a = n rho / q; explicit weights use
// inclusion-exclusion over coupon subsets (2^n terms, capped at n = 24).
inline double success_probability(const ResetParams& p) {
    double q = p.q();
    if (p.equal_weights()) {
        double a = static_cast<double>(p.n) * p.rho / q;
        return std::exp(log_gamma(static_cast<double>(p.n) + 1.0) + log_gamma(1.0 + a) -
                        log_gamma(static_cast<double>(p.n) + 1.0 + a));
    }
    if (p.n > 24) throw SubsetLimit("inclusion-exclusion capped at n = 24");

    std::vector<double> cond(p.weights.size());
    for (std::size_t i = 0; i < cond.size(); ++i) cond[i] = p.weights[i] / q;

    // Gray-code walk: one conditional probability enters or leaves per step.
    const std::uint32_t total = 1u << p.n;
    double sum = 0.0;
    double pi_j = 0.0;
    std::uint32_t prev = 0;
    int bits = 0;
    for (std::uint32_t i = 1; i < total; ++i) {
        std::uint32_t code = i ^ (i >> 1);
        std::uint32_t flipped = code ^ prev;
        int idx = 0;
        while ((flipped >> idx) != 1u) ++idx;
        if (code & flipped) {
            pi_j += cond[static_cast<std::size_t>(idx)];
            ++bits;
        } else {
            pi_j -= cond[static_cast<std::size_t>(idx)];
            --bits;
        }
        prev = code;
        double term = 1.0 / (1.0 - q * (1.0 - pi_j));
        sum += (bits & 1) ? term : -term;
    }
    return 1.0 - p.rho * sum;
}

// F(z) = (1 - q z) phi(q z) / (1 - z + rho z phi(q z)). Valid while q z < 1
// and the denominator stays positive.
inline double reset_pgf(const ResetParams& p, double z) {
    if (!p.equal_weights())
        throw DomainError("analytic reset pgf requires equal weights");
    double q = p.q();
    if (!(q * z < 1.0)) throw PoleError("need q*z < 1");
    if (z == 0.0) return 0.0;
    double phi = uniform_pgf(p.n, q * z, PgfMode::value);
    double denom = 1.0 - z + p.rho * z * phi;
    if (!(denom > 0.0)) throw DenominatorNonpositive("renewal denominator not positive");
    return (1.0 - q * z) * phi / denom;
}

// E T = (1 - s) / (rho s).
inline double exact_mean(const ResetParams& p) {
    double s = success_probability(p);
    return (1.0 - s) / (p.rho * s);
}

// Equivalent beta-function form of the equal-weight mean, kept as an
// independent route for consistency checks.
inline double exact_mean_beta_form(const ResetParams& p) {
    if (!p.equal_weights()) throw DomainError("beta form requires equal weights");
    double a = static_cast<double>(p.n) * p.rho / p.q();
    double log_beta = log_gamma(static_cast<double>(p.n)) + log_gamma(a) -
                      log_gamma(static_cast<double>(p.n) + a);
    double inv = 1.0 / (static_cast<double>(p.n) * p.rho * std::exp(log_beta));
    return (inv - 1.0) / p.rho;
}

struct ResetSolution {
    ResetParams params;
    double s;
    double log_s;
    double mean;

    double pgf(double z) const { return reset_pgf(params, z); }
};

inline ResetSolution solve_reset(const ResetParams& p) {
    double s = success_probability(p);
    return ResetSolution{p, s, std::log(s), (1.0 - s) / (p.rho * s)};
}

// rho * q * phi'(q): the rare-success regime needs this to be small. Computed
// from the value and log-derivative modes of the excursion PGF.
inline double rare_success_hypothesis_value(int n, double rho) {
    double q = 1.0 - rho;
    return rho * uniform_pgf(n, q, PgfMode::value) * uniform_pgf(n, q, PgfMode::log_derivative);
}

namespace detail {

struct ExcursionResult {
    std::uint64_t days;
    bool completed;
};

// Excursion replayer with reusable scratch (the regenerative rejection loop
// and the rare-success suites run tens of millions of excursions). Each day
// spends one u64: low 32 bits decide reset vs standard at 2^-32 resolution,
// high 32 bits pick the standard coupon. A failed excursion's length includes
// the reset draw itself.
class ExcursionRunner {
public:
    explicit ExcursionRunner(const ResetParams& p) : n_(p.n), equal_(p.equal_weights()) {
        double t = p.rho * 4294967296.0;
        reset_threshold_ = t < 4294967295.0 ? static_cast<std::uint32_t>(t + 0.5) : 4294967295u;
        if (!equal_) {
            cum_.resize(static_cast<std::size_t>(n_));
            double q = p.q(), acc = 0.0;
            for (int i = 0; i < n_; ++i) {
                acc += p.weights[static_cast<std::size_t>(i)] / q;
                cum_[static_cast<std::size_t>(i)] = acc;
            }
            cum_.back() = 1.0;
        }
        if (n_ > 64) mask_.resize(static_cast<std::size_t>((n_ + 63) / 64));
    }

    ExcursionResult run(Xoshiro256pp& rng) {
        return n_ <= 64 ? run_small(rng) : run_large(rng);
    }

private:
    std::uint32_t draw_coupon(std::uint64_t r) const {
        if (equal_)
            return static_cast<std::uint32_t>(((r >> 32) * static_cast<std::uint64_t>(n_)) >> 32);
        double u = static_cast<double>(r >> 32) * 0x1.0p-32;
        std::uint32_t j = 0;
        while (cum_[j] <= u && j + 1 < static_cast<std::uint32_t>(n_)) ++j;
        return j;
    }

    ExcursionResult run_small(Xoshiro256pp& rng) {
        const std::uint64_t full = n_ == 64 ? ~0ull : (1ull << n_) - 1;
        std::uint64_t have = 0, days = 0;
        for (;;) {
            std::uint64_t r = rng.next();
            ++days;
            if (static_cast<std::uint32_t>(r) < reset_threshold_) return {days, false};
            have |= 1ull << draw_coupon(r);
            if (have == full) return {days, true};
        }
    }

    ExcursionResult run_large(Xoshiro256pp& rng) {
        std::fill(mask_.begin(), mask_.end(), 0ull);
        int remaining = n_;
        std::uint64_t days = 0;
        for (;;) {
            std::uint64_t r = rng.next();
            ++days;
            if (static_cast<std::uint32_t>(r) < reset_threshold_) return {days, false};
            std::uint32_t j = draw_coupon(r);
            std::uint64_t bit = 1ull << (j & 63u);
            std::uint64_t& word = mask_[j >> 6];
            if (!(word & bit)) {
                word |= bit;
                if (--remaining == 0) return {days, true};
            }
        }
    }

    int n_;
    bool equal_;
    std::uint32_t reset_threshold_;
    std::vector<double> cum_;
    std::vector<std::uint64_t> mask_;
};

// Geometric on {0,1,...} with success s, by inversion.
inline std::uint64_t geometric_failures(double s, Xoshiro256pp& rng) {
    if (s >= 1.0) return 0;
    double u = 1.0 - rng.next_double();  // (0,1]
    return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-s)));
}

}  // namespace detail

enum class ResetSimMode { direct, regenerative };

// One sample of T. Direct mode replays the calendar day by day. Regenerative
// mode samples the number of failed excursions from geometric(s), each failed
// length by conditioned replay, and the final successful excursion length by
// summing per-stage geometrics tilted by the no-reset probability.
inline std::uint64_t simulate_reset_one(const ResetParams& p, Xoshiro256pp& rng,
                                        ResetSimMode mode = ResetSimMode::direct) {
    detail::ExcursionRunner runner(p);
    if (mode == ResetSimMode::direct) {
        std::uint64_t total = 0;
        for (;;) {
            auto ex = runner.run(rng);
            total += ex.days;
            if (ex.completed) return total;
        }
    }

    if (!p.equal_weights()) throw DomainError("regenerative mode requires equal weights");
    if (p.n > 10000) throw DomainError("regenerative mode capped at n = 10000");

    double s = success_probability(p);
    double q = p.q();
    std::uint64_t total = 0;

    std::uint64_t failures = detail::geometric_failures(s, rng);
    for (std::uint64_t g = 0; g < failures; ++g) {
        for (;;) {
            auto ex = runner.run(rng);
            if (!ex.completed) {
                total += ex.days;
                break;
            }
        }
    }

    // Successful excursion: with m coupons still missing, the number of draws
    // to the next new coupon is geometric with failure probability q(1 - m/n)
    // after conditioning the whole excursion on seeing no reset.
    for (int m = p.n; m >= 1; --m) {
        double fail = q * (1.0 - static_cast<double>(m) / p.n);
        if (fail <= 0.0) {
            total += 1;
            continue;
        }
        double u = 1.0 - rng.next_double();
        total += 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(fail)));
    }
    return total;
}

inline std::uint64_t simulate_reset(const ResetParams& p, std::uint64_t seed,
                                    ResetSimMode mode = ResetSimMode::direct) {
    Xoshiro256pp rng = stream_rng(seed, 0);
    return simulate_reset_one(p, rng, mode);
}

// Batch sampler: sample i draws from counter stream (seed, i), so results do
// not depend on batching or thread fan-out.
inline std::vector<std::uint64_t> simulate_reset_batch(const ResetParams& p, std::uint64_t seed,
                                                       std::size_t count,
                                                       ResetSimMode mode = ResetSimMode::direct) {
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        Xoshiro256pp rng = stream_rng(seed, i);
        out[i] = simulate_reset_one(p, rng, mode);
    }
    return out;
}

// Day-level count kernel of the equal-weight reset collector: each day the
// album resets with probability rho, otherwise a uniform coupon is drawn.
// Hitting {n} from 0 under this kernel is the completion day; its mean equals
// (1 - s)/(rho s), which gives an independent route to the closed forms.
inline CountKernel reset_count_kernel(const ResetParams& p) {
    if (!p.equal_weights()) throw DomainError("count kernel requires equal weights");
    const int n = p.n;
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    std::vector<double> rows(N * N, 0.0);
    for (int k = 0; k <= n; ++k) {
        auto row = rows.begin() + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(N);
        double fresh = (1.0 - p.rho) * static_cast<double>(n - k) / n;
        row[0] += p.rho;
        if (k < n) row[k + 1] += fresh;
        row[k] += 1.0 - p.rho - fresh;
    }
    return CountKernel(n, std::move(rows));
}

inline TargetSet reset_completion_target(const ResetParams& p) { return TargetSet({p.n}); }

enum class ResetRegime { fixed_rho, lambda_over_n, equal_reset };

// log(rho * s_n^asym) for the three scaling regimes.
inline double regime_normalization(int n, double rho, ResetRegime regime) {
    if (n < 1) throw DomainError("need n >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("reset probability must lie in (0,1)");
    double q = 1.0 - rho;
    switch (regime) {
        case ResetRegime::fixed_rho: {
            // s ~ sqrt(2 pi rho n) (q rho^{rho/q})^n
            constexpr double two_pi = 6.283185307179586;
            return std::log(rho) + 0.5 * std::log(two_pi * rho * n) +
                   n * (std::log(q) + (rho / q) * std::log(rho));
        }
        case ResetRegime::lambda_over_n: {
            double a = static_cast<double>(n) * rho / q;
            return std::log(rho) + log_gamma(1.0 + a) - a * std::log(static_cast<double>(n));
        }
        case ResetRegime::equal_reset:
            if (std::fabs(rho - 1.0 / (n + 1.0)) > 1e-12)
                throw RegimeMismatch("equal_reset regime requires rho = 1/(n+1)");
            return -2.0 * std::log(static_cast<double>(n) + 1.0);
    }
    throw DomainError("unknown regime");
}

// E exp(a rho s T), evaluated through the PGF at z = exp(a rho s). For
// rare-success parameter sequences this approaches 1/(1-a).
inline double positive_exponential_moment(const ResetParams& p, double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("exponent fraction must lie in (0,1)");
    double s = success_probability(p);
    return reset_pgf(p, std::exp(a * p.rho * s));
}

inline double gumbel_reference(double y) { return std::exp(-std::exp(-y)); }

}

#pragma once

// Finite-state Markov chain core: count kernels, stationary distributions,
// entry fluxes into target sets, hitting-time solves, and block moments of
// entry counts. Everything downstream (the three coupon models, the audits,
// the verification suites) is built on these operations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "logspace.hpp"

namespace couponflux {

// Row-stochastic kernel on states {0,...,n}. Rows are validated once at
// construction: entries nonnegative, each row sum within 1e-12 of 1.
class CountKernel {
public:
    CountKernel(int n, std::vector<double> entries) : n_(n), p_(std::move(entries)) {
        const std::size_t N = static_cast<std::size_t>(n_) + 1;
        if (n_ < 0 || p_.size() != N * N)
            throw LengthMismatch("kernel storage does not match state count");
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                double v = p_[i * N + j];
                if (!(v >= 0.0))
                    throw NonStochastic("negative entry in row " + std::to_string(i));
                s += v;
            }
            if (std::fabs(s - 1.0) > 1e-12)
                throw NonStochastic("row " + std::to_string(i) + " sums to " + std::to_string(s));
        }
    }

    int n() const { return n_; }
    std::size_t states() const { return static_cast<std::size_t>(n_) + 1; }
    double operator()(std::size_t i, std::size_t j) const { return p_[i * states() + j]; }
    const std::vector<double>& data() const { return p_; }

    // y = x P
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const std::size_t N = states();
        y.assign(N, 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            double xi = x[i];
            if (xi == 0.0) continue;
            const double* row = p_.data() + i * N;
            for (std::size_t j = 0; j < N; ++j) y[j] += xi * row[j];
        }
    }

private:
    int n_;
    std::vector<double> p_;
};

struct StationaryDistribution {
    std::vector<double> probs;  // linear space, values below 1e-300 flushed to 0
    double residual;            // max_j |(pi P)_j - pi_j| after the solve

    double log_prob(std::size_t k) const { return log_from_linear(probs[k]); }
};

// Non-empty subset of {0,...,n}, kept sorted and duplicate-free.
struct TargetSet {
    std::vector<int> members;

    explicit TargetSet(std::vector<int> m) : members(std::move(m)) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (members.empty()) throw DomainError("target set is empty");
    }

    void check_against(const CountKernel& k) const {
        if (members.front() < 0 || members.back() > k.n())
            throw DomainError("target member outside state space");
    }
};

struct BlockMomentReport {
    long long block_length;
    double first_moment;       // expected entries per block
    double second_factorial;   // E[N(N-1)] for the block entry count N
    double ratio;              // second_factorial / first_moment, NaN if degenerate
};

// Exact flux, its closed-form or asymptotic prediction, and their gap, all in
// log space. log_exact_alt carries a second exact route when the model has one
// (e.g. a last-ladder-step identity); models without one repeat log_exact.
struct FluxReport {
    double log_exact;
    double log_exact_alt;
    double log_predicted;
    double log_ratio;  // log_exact - log_predicted
};

namespace detail {

// GTH elimination: subtraction-free, so every stationary mass is computed to
// componentwise relative accuracy even hundreds of orders of magnitude below
// the largest one. A Gaussian solve with a normalization row loses those
// entries entirely, which is fatal for the rare-event fluxes computed here.
inline std::vector<double> gth_solve(const CountKernel& P) {
    const std::size_t N = P.states();
    std::vector<double> A(P.data());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return A[i * N + j]; };

    for (std::size_t k = N - 1; k >= 1; --k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += at(k, j);
        if (!(s > 0.0))
            throw SingularSolve("state " + std::to_string(k) + " unreachable during elimination");
        for (std::size_t i = 0; i < k; ++i) at(i, k) /= s;
        for (std::size_t i = 0; i < k; ++i) {
            double f = at(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < k; ++j) at(i, j) += f * at(k, j);
        }
    }

    std::vector<double> nu(N, 0.0);
    nu[0] = 1.0;
    double total = 1.0;
    for (std::size_t k = 1; k < N; ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += nu[i] * at(i, k);
        nu[k] = v;
        total += v;
    }
    for (auto& v : nu) v /= total;
    return nu;
}

inline std::vector<double> power_iteration_solve(const CountKernel& P) {
    const std::size_t N = P.states();
    std::vector<double> v(N, 1.0 / static_cast<double>(N)), w;
    for (int it = 0; it < 200000; ++it) {
        P.apply(v, w);
        double diff = 0.0;
        for (std::size_t j = 0; j < N; ++j) diff = std::max(diff, std::fabs(w[j] - v[j]));
        v.swap(w);
        if (diff <= 1e-14) return v;
    }
    throw SingularSolve("power iteration did not converge");
}

}  // namespace detail

// Dense GTH up to 2000 states is exact enough and fast enough; larger chains
// fall back to power iteration (which only resolves masses near the scale of
// the largest ones, but such chains are outside the rare-event use cases).
inline StationaryDistribution stationary_distribution(const CountKernel& P) {
    std::vector<double> nu =
        P.n() <= 2000 ? detail::gth_solve(P) : detail::power_iteration_solve(P);
    for (auto& v : nu)
        if (v < kLinearFloor) v = 0.0;

    std::vector<double> w;
    P.apply(nu, w);
    double res = 0.0;
    for (std::size_t j = 0; j < P.states(); ++j) res = std::max(res, std::fabs(w[j] - nu[j]));
    return StationaryDistribution{std::move(nu), res};
}

// Log of the stationary probability of entering the target on one step:
// log sum_{x not in A} pi(x) P(x, A). The per-state terms can sit far below
// the linear floor, hence the log-space accumulation.
inline double entry_flux(const CountKernel& P, const StationaryDistribution& pi,
                         const TargetSet& target) {
    target.check_against(P);
    const std::size_t N = P.states();
    if (target.members.size() == N) throw EmptyComplement("target covers every state");
    if (pi.probs.size() != N) throw LengthMismatch("distribution length does not match kernel");

    std::vector<char> in_target(N, 0);
    for (int m : target.members) in_target[static_cast<std::size_t>(m)] = 1;

    double acc = kNegInf;
    for (std::size_t x = 0; x < N; ++x) {
        if (in_target[x] || pi.probs[x] == 0.0) continue;
        double pa = 0.0;
        for (int m : target.members) pa += P(x, static_cast<std::size_t>(m));
        if (pa == 0.0) continue;
        acc = log_add(acc, std::log(pi.probs[x]) + std::log(pa));
    }
    return acc;
}

// Expected steps to first hit the target from `start` (0 if already inside).
// Solves (I - Q) h = 1 on the complement with partially pivoted LU.
inline double mean_hitting_time(const CountKernel& P, const TargetSet& target, int start) {
    target.check_against(P);
    const std::size_t N = P.states();
    if (start < 0 || static_cast<std::size_t>(start) >= N)
        throw DomainError("start state outside state space");

    std::vector<char> in_target(N, 0);
    for (int m : target.members) in_target[static_cast<std::size_t>(m)] = 1;
    if (in_target[static_cast<std::size_t>(start)]) return 0.0;

    std::vector<std::size_t> comp;
    for (std::size_t x = 0; x < N; ++x)
        if (!in_target[x]) comp.push_back(x);
    const std::size_t M = comp.size();

    std::vector<double> A(M * M);
    std::vector<double> h(M, 1.0);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            A[i * M + j] = (i == j ? 1.0 : 0.0) - P(comp[i], comp[j]);

    std::vector<std::size_t> piv(M);
    for (std::size_t i = 0; i < M; ++i) piv[i] = i;
    for (std::size_t c = 0; c < M; ++c) {
        std::size_t best = c;
        for (std::size_t r = c + 1; r < M; ++r)
            if (std::fabs(A[r * M + c]) > std::fabs(A[best * M + c])) best = r;
        if (std::fabs(A[best * M + c]) < 1e-300)
            throw SingularSolve("hitting-time system is singular");
        if (best != c) {
            for (std::size_t j = 0; j < M; ++j) std::swap(A[c * M + j], A[best * M + j]);
            std::swap(h[c], h[best]);
        }
        double inv = 1.0 / A[c * M + c];
        for (std::size_t r = c + 1; r < M; ++r) {
            double f = A[r * M + c] * inv;
            if (f == 0.0) continue;
            A[r * M + c] = 0.0;
            for (std::size_t j = c + 1; j < M; ++j) A[r * M + j] -= f * A[c * M + j];
            h[r] -= f * h[c];
        }
    }
    for (std::size_t ri = M; ri-- > 0;) {
        double v = h[ri];
        for (std::size_t j = ri + 1; j < M; ++j) v -= A[ri * M + j] * h[j];
        h[ri] = v / A[ri * M + ri];
    }

    for (std::size_t i = 0; i < M; ++i)
        if (comp[i] == static_cast<std::size_t>(start)) return h[i];
    throw DomainError("start state lost during solve");  // unreachable
}

// First and second factorial moments of the number of target entries in a
// stationary block of the given length. The first moment is block_length
// times the one-step entry probability; the second factorial moment sums the
// pair correlations 2 sum_{d=1}^{b-1} (b-d) P(entry at 1 and at 1+d).
inline BlockMomentReport block_entry_moments(const CountKernel& P,
                                             const StationaryDistribution& pi,
                                             const TargetSet& target, long long block_length) {
    if (block_length < 1) throw DomainError("block length must be positive");
    const std::size_t N = P.states();
    std::vector<char> in_target(N, 0);
    for (int m : target.members) in_target[static_cast<std::size_t>(m)] = 1;

    double mu = from_log(entry_flux(P, pi, target));
    double first = static_cast<double>(block_length) * mu;

    // v starts as the sub-probability vector of (X0 outside, X1 = y inside),
    // then evolves under the full kernel; c_d picks up the entry flux of v.
    std::vector<double> v(N, 0.0), w;
    for (std::size_t x = 0; x < N; ++x) {
        if (in_target[x] || pi.probs[x] == 0.0) continue;
        for (int m : target.members) v[static_cast<std::size_t>(m)] += pi.probs[x] * P(x, static_cast<std::size_t>(m));
    }

    double second = 0.0;
    for (long long d = 1; d <= block_length - 1; ++d) {
        if (d >= 2) {
            P.apply(v, w);
            v.swap(w);
        }
        double c = 0.0;
        for (std::size_t x = 0; x < N; ++x) {
            if (in_target[x] || v[x] == 0.0) continue;
            double pa = 0.0;
            for (int m : target.members) pa += P(x, static_cast<std::size_t>(m));
            c += v[x] * pa;
        }
        second += 2.0 * static_cast<double>(block_length - d) * c;
    }

    double ratio = first > 0.0 ? second / first
                               : std::numeric_limits<double>::quiet_NaN();
    return BlockMomentReport{block_length, first, second, ratio};
}

// Average per-step entry probability over a finite horizon started from `dist`.
// From stationarity this reproduces the entry flux; computing it by explicit
// propagation gives an independent consistency check on the solve.
inline double average_entry_rate(const CountKernel& P, const std::vector<double>& dist,
                                 const TargetSet& target, long long horizon) {
    if (horizon < 1) throw DomainError("horizon must be positive");
    const std::size_t N = P.states();
    if (dist.size() != N) throw LengthMismatch("distribution length does not match kernel");
    std::vector<char> in_target(N, 0);
    for (int m : target.members) in_target[static_cast<std::size_t>(m)] = 1;

    std::vector<double> v(dist), w;
    double acc = 0.0;
    for (long long t = 0; t < horizon; ++t) {
        double c = 0.0;
        for (std::size_t x = 0; x < N; ++x) {
            if (in_target[x] || v[x] == 0.0) continue;
            double pa = 0.0;
            for (int m : target.members) pa += P(x, static_cast<std::size_t>(m));
            c += v[x] * pa;
        }
        acc += c;
        P.apply(v, w);
        v.swap(w);
    }
    return acc / static_cast<double>(horizon);
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw LengthMismatch("distribution lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return 0.5 * s;
}

// TV distance between two distributions evolved jointly for 0..steps steps.
// For any stochastic kernel the sequence is non-increasing; tests assert it.
inline std::vector<double> tv_contraction_check(const CountKernel& P, std::vector<double> a,
                                                std::vector<double> b, int steps) {
    if (a.size() != P.states() || b.size() != P.states())
        throw LengthMismatch("distribution length does not match kernel");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    std::vector<double> ta, tb;
    out.push_back(total_variation(a, b));
    for (int t = 0; t < steps; ++t) {
        P.apply(a, ta);
        P.apply(b, tb);
        a.swap(ta);
        b.swap(tb);
        out.push_back(total_variation(a, b));
    }
    return out;
}

}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <couponflux/chain.hpp>
#include <couponflux/errors.hpp>
#include <couponflux/reset.hpp>

using namespace couponflux;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ResetParams(0, 0.5), DomainError);
    CHECK_THROWS_AS(ResetParams(3, 0.0), DomainError);
    CHECK_THROWS_AS(ResetParams(3, 1.0), DomainError);
    CHECK_THROWS_AS(ResetParams(3, 0.25, {0.25, 0.25}), LengthMismatch);
    // weights must be positive and sum to 1 - rho
    CHECK_THROWS_AS(ResetParams(2, 0.5, {0.6, -0.1}), DomainError);
    CHECK_THROWS_AS(ResetParams(2, 0.5, {0.3, 0.3}), DomainError);
    CHECK_NOTHROW(ResetParams(2, 0.5, {0.2, 0.3}));
}

TEST_CASE("uniform collector pgf at small n") {
    // n = 1: phi(x) = x. n = 2: phi(x) = (x/2) x / (1 - x/2)
    CHECK(uniform_pgf(1, 0.7, PgfMode::value) == Catch::Approx(0.7).epsilon(1e-15));
    double x = 0.6;
    double expect = (0.5 * x) * x / (1.0 - 0.5 * x);
    CHECK(uniform_pgf(2, x, PgfMode::value) == Catch::Approx(expect).epsilon(1e-14));
    // log-derivative mode returns x phi'(x)/phi(x) = sum_j 1/(1 - (1-j/n) x)
    double expect_ld = 1.0 / (1.0 - 0.5 * x) + 1.0;
    CHECK(uniform_pgf(2, x, PgfMode::log_derivative) == Catch::Approx(expect_ld).epsilon(1e-14));
}

TEST_CASE("success probability closed form") {
    // s = n! Gamma(1+a) / Gamma(n+1+a) with a = n rho / (1 - rho)
    for (int n : {1, 2, 5, 9}) {
        for (double rho : {0.1, 0.3, 0.6}) {
            double a = n * rho / (1.0 - rho);
            double expect =
                std::exp(std::lgamma(n + 1.0) + std::lgamma(1.0 + a) - std::lgamma(n + 1.0 + a));
            CHECK(success_probability(ResetParams(n, rho)) ==
                  Catch::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("balanced reset rate gives s = 1/(n+1) and mean n(n+1)") {
    for (int n = 1; n <= 10; ++n) {
        ResetParams par(n, 1.0 / (n + 1.0));
        ResetSolution sol = solve_reset(par);
        CHECK(sol.s == Catch::Approx(1.0 / (n + 1.0)).margin(1e-12));
        CHECK(sol.mean == Catch::Approx(static_cast<double>(n) * (n + 1.0)).epsilon(1e-9));
    }
    ResetSolution three = solve_reset(ResetParams(3, 0.25));
    CHECK(three.s == Catch::Approx(0.25).margin(1e-9));
    CHECK(three.mean == Catch::Approx(12.0).margin(1e-9));
}

TEST_CASE("pinned rare-regime point n=12 rho=0.3") {
    ResetParams par(12, 0.3);
    ResetSolution sol = solve_reset(par);
    CHECK(sol.s == Catch::Approx(1.371701775628889e-4).epsilon(1e-12));
    CHECK(sol.mean == Catch::Approx(24297.38124294611).epsilon(1e-10));
    CHECK(rare_success_hypothesis_value(12, 0.3) ==
          Catch::Approx(8.033434273305097e-4).epsilon(1e-10));
}

TEST_CASE("the three mean routes agree") {
    // closed form (1-s)/(rho s), the beta-function form, and the numerical
    // derivative of the completion-time pgf at 1
    for (int n : {1, 4, 8, 10}) {
        for (double rho : {0.5 / (n + 1.0), 1.0 / (n + 1.0), 0.4}) {
            ResetParams par(n, rho);
            ResetSolution sol = solve_reset(par);
            CHECK(exact_mean_beta_form(par) == Catch::Approx(sol.mean).epsilon(1e-10));
            // the pgf has a pole about 1/mean above z = 1, so the central
            // difference needs a step well inside that distance
            double eps = 1e-4 / sol.mean;
            double deriv = (reset_pgf(par, 1.0 + eps) - reset_pgf(par, 1.0 - eps)) / (2.0 * eps);
            CHECK(deriv == Catch::Approx(sol.mean).epsilon(1e-6));
        }
    }
}

TEST_CASE("count kernel mean agrees with the excursion closed form") {
    for (int n : {2, 5}) {
        ResetParams par(n, 0.2);
        CountKernel K = reset_count_kernel(par);
        // rows are stochastic
        for (int k = 0; k <= n; ++k) {
            double s = 0.0;
            for (int j = 0; j <= n; ++j) s += K(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
            CHECK(s == Catch::Approx(1.0).margin(1e-12));
        }
        double direct = mean_hitting_time(K, reset_completion_target(par), 0);
        CHECK(direct == Catch::Approx(exact_mean(par)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(reset_count_kernel(ResetParams(2, 0.5, {0.2, 0.3})), DomainError);
}

TEST_CASE("completion-time pgf is a proper pgf") {
    ResetParams par(5, 0.3);
    CHECK(reset_pgf(par, 1.0) == Catch::Approx(1.0).margin(1e-12));
    double prev = 0.0;
    for (double z : {0.2, 0.5, 0.8, 0.95, 1.0}) {
        double v = reset_pgf(par, z);
        CHECK(v >= prev);
        CHECK(v <= 1.0 + 1e-12);
        prev = v;
    }
    // q z must stay below 1; far beyond the radius the denominator turns
    CHECK_THROWS_AS(reset_pgf(par, 1.0 / par.q() + 0.01), PoleError);
}

TEST_CASE("weighted parameters accept a matching equal-weight vector") {
    // explicit equal weights must reproduce the closed form for equal weights
    int n = 4;
    double rho = 0.2;
    std::vector<double> w(static_cast<std::size_t>(n), (1.0 - rho) / n);
    double se = success_probability(ResetParams(n, rho));
    double sw = success_probability(ResetParams(n, rho, w));
    CHECK(sw == Catch::Approx(se).epsilon(1e-10));
    // uneven weights starve the rare coupons and slow the collection
    std::vector<double> tilt{0.5, 0.1, 0.1, 0.1};
    CHECK(success_probability(ResetParams(n, rho, tilt)) < se);

    // the inclusion-exclusion walk is capped
    std::vector<double> many(25, (1.0 - rho) / 25.0);
    CHECK_THROWS_AS(success_probability(ResetParams(25, rho, many)), SubsetLimit);
}

TEST_CASE("simulation matches the exact mean at moderate rates") {
    ResetParams par(3, 0.25);
    const std::size_t N = 4000;
    std::vector<std::uint64_t> t = simulate_reset_batch(par, kDefaultSeed, N);
    REQUIRE(t.size() == N);
    double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(N);
    // Var T ~ mean^2 for near-geometric laws; allow five standard errors
    double se = 12.0 / std::sqrt(static_cast<double>(N));
    CHECK(std::fabs(mean - 12.0) < 5.0 * se);
    for (std::uint64_t v : t) CHECK(v >= static_cast<std::uint64_t>(par.n));
}

TEST_CASE("direct and regenerative samplers draw from the same law") {
    ResetParams par(3, 0.25);
    const std::size_t N = 3000;
    std::vector<std::uint64_t> a = simulate_reset_batch(par, 11, N, ResetSimMode::direct);
    std::vector<std::uint64_t> b = simulate_reset_batch(par, 12, N, ResetSimMode::regenerative);
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    // integer samples tie heavily; step through a whole tie value on both
    // sides before comparing the empirical cdfs
    while (i < N && j < N) {
        double v = std::min(xa[i], xb[j]);
        while (i < N && xa[i] <= v) ++i;
        while (j < N && xb[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) - static_cast<double>(j)) /
                            static_cast<double>(N));
    }
    // 1% two-sample threshold 1.63 sqrt(2/N) = 0.0421
    CHECK(d < 0.0421);
}

TEST_CASE("simulation is reproducible per stream") {
    ResetParams par(4, 0.3);
    std::vector<std::uint64_t> a = simulate_reset_batch(par, 99, 64);
    std::vector<std::uint64_t> b = simulate_reset_batch(par, 99, 64);
    CHECK(a == b);
    CHECK(a != simulate_reset_batch(par, 100, 64));
    CHECK(simulate_reset(par, 99) == a[0]);
}

TEST_CASE("regime normalizations") {
    // balanced regime is exact: log(rho s) = -2 log(n+1)
    for (int n : {4, 9}) {
        double rho = 1.0 / (n + 1.0);
        double expect = std::log(rho) + std::log(success_probability(ResetParams(n, rho)));
        CHECK(regime_normalization(n, rho, ResetRegime::equal_reset) ==
              Catch::Approx(expect).margin(1e-9));
    }
    CHECK_THROWS_AS(regime_normalization(5, 0.3, ResetRegime::equal_reset), RegimeMismatch);

    // fixed rho: Stirling-scale prediction lands within 0.11% at n = 200
    double lg = regime_normalization(200, 0.3, ResetRegime::fixed_rho);
    double ratio =
        std::exp(lg - std::log(0.3)) / success_probability(ResetParams(200, 0.3));
    CHECK(ratio == Catch::Approx(0.9989033841398215).epsilon(1e-10));

    // lambda-over-n at rho = 1/(n+1): prediction Gamma(2)/n vs exact 1/(n+1)
    double lg2 = regime_normalization(100, 1.0 / 101.0, ResetRegime::lambda_over_n);
    double pred = std::exp(lg2 - std::log(1.0 / 101.0));
    CHECK(pred == Catch::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("positive exponential moments approach 1/(1-a) in the rare regime") {
    ResetParams par(12, 0.3);
    CHECK(positive_exponential_moment(par, 0.5) ==
          Catch::Approx(1.9990394709502892).epsilon(1e-10));
    CHECK(positive_exponential_moment(par, 0.9) ==
          Catch::Approx(9.93250212916116).epsilon(1e-10));
    CHECK_THROWS_AS(positive_exponential_moment(par, 1.0), DomainError);
    CHECK_THROWS_AS(positive_exponential_moment(par, 0.0), DomainError);
}

TEST_CASE("gumbel reference values") {
    CHECK(gumbel_reference(0.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(gumbel_reference(-1.0) == Catch::Approx(0.06598803584531254).epsilon(1e-12));
    CHECK(gumbel_reference(1.0) == Catch::Approx(0.6922006275553464).epsilon(1e-12));
    CHECK(gumbel_reference(2.0) == Catch::Approx(0.8734230184931167).epsilon(1e-12));
}

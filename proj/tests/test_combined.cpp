#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include <couponflux/careless.hpp>
#include <couponflux/combined.hpp>
#include <couponflux/errors.hpp>
#include <couponflux/qseries.hpp>

using namespace couponflux;

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(CombinedParams(3, 0.0, 0.5));  // no-loss edge is allowed
    CHECK_THROWS_AS(CombinedParams(3, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(CombinedParams(3, -0.1, 0.5), DomainError);
    CHECK_THROWS_AS(CombinedParams(3, 0.2, 0.0), DomainError);  // survival must thin
    CHECK_THROWS_AS(CombinedParams(3, 0.2, 1.0), DomainError);
    CHECK_THROWS_AS(CombinedParams(0, 0.2, 0.5), DomainError);
    CombinedParams par(3, 0.2, 0.4);
    CHECK(par.Q() == Catch::Approx(0.8));
    CHECK(par.S() == Catch::Approx(0.6));
}

TEST_CASE("kernel rows are stochastic and upward rate matches the closed form") {
    CombinedParams par(8, 0.2, 0.5);
    CountKernel K = combined_kernel(par);
    for (int k = 0; k <= 8; ++k) {
        double s = 0.0;
        for (int j = 0; j <= 8; ++j) s += K(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
        CHECK(s == Catch::Approx(1.0).margin(1e-12));
        if (k < 8) {
            double expect = (8.0 - k) / 8.0 * 0.8 * std::pow(0.5, k + 1);
            CHECK(K(static_cast<std::size_t>(k), static_cast<std::size_t>(k + 1)) ==
                  Catch::Approx(expect).margin(1e-12));
            CHECK(std::exp(combined_log_cut_rate(par, k)) ==
                  Catch::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero-loss kernel reduces to the careless kernel") {
    CombinedParams cpar(12, 0.0, 0.5);
    CarelessParams qpar(12, 0.5);
    CountKernel A = combined_kernel(cpar);
    CountKernel B = careless_kernel(qpar);
    for (int i = 0; i <= 12; ++i)
        for (int j = 0; j <= 12; ++j)
            CHECK(A(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ==
                  Catch::Approx(B(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
                      .margin(1e-14));
}

TEST_CASE("lucky-climb weights bound the stationary law from below") {
    CombinedParams par(12, 0.2, 0.5);
    StationaryDistribution nu = stationary_distribution(combined_kernel(par));
    for (int k = 0; k <= 12; ++k) {
        double lw = log_lucky_weight(12, k, par.S(), par.Q());
        double lower = nu.probs[0] * std::exp(lw);
        CHECK(nu.probs[static_cast<std::size_t>(k)] >= lower * (1.0 - 1e-12));
    }
}

TEST_CASE("cut-flux balance holds at every level") {
    CombinedParams par(12, 0.2, 0.5);
    CountKernel K = combined_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    for (int k = 0; k < 12; ++k) {
        double lhs = nu.probs[static_cast<std::size_t>(k)] *
                     std::exp(combined_log_cut_rate(par, k));
        double rhs = 0.0;
        for (int j = k + 1; j <= 12; ++j)
            for (int i = 0; i <= k; ++i)
                rhs += nu.probs[static_cast<std::size_t>(j)] *
                       K(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
        double m = std::max(lhs, rhs);
        if (m > 1e-280) CHECK(std::fabs(lhs - rhs) / m < 1e-10);
    }
}

TEST_CASE("pinned completion values at Q=0.8 S=0.5") {
    auto mean0 = [](int n) {
        CombinedParams par(n, 0.2, 0.5);
        return mean_hitting_time(combined_kernel(par), combined_completion_target(par), 0);
    };
    CHECK(mean0(1) == Catch::Approx(2.5).epsilon(1e-12));
    CHECK(mean0(2) == Catch::Approx(23.75).epsilon(1e-11));
    CHECK(mean0(4) == Catch::Approx(14929.270833332268).epsilon(1e-9));
    CHECK(mean0(6) == Catch::Approx(233078752.39609614).epsilon(1e-9));

    FluxReport f = combined_flux(CombinedParams(6, 0.2, 0.5));
    CHECK(std::exp(f.log_exact) == Catch::Approx(4.2911779839483954e-9).epsilon(1e-10));
    CHECK(f.log_exact == Catch::Approx(f.log_exact_alt).margin(1e-10));
}

TEST_CASE("flux ratio at the pinned large size") {
    FluxReport f = combined_flux(CombinedParams(40, 0.2, 0.5));
    CHECK(f.log_ratio == Catch::Approx(-0.06806464666806278).margin(1e-8));
}

TEST_CASE("mixing bound pinned value") {
    CHECK(combined_mixing_bound(10, 0.5, 0) == 1.0);
    CHECK(combined_mixing_bound(10, 0.5, 20) == Catch::Approx(9.5367431640625e-6).epsilon(1e-14));
}

TEST_CASE("vanishing survival-loss tears the asymptotic away from the clumsy scale") {
    // at beta = 1e-3 the infinite product in the denominator collapses, so
    // the lucky-climb asymptotic and the pure-loss scale alpha (1-alpha)^n
    // separate by far more than 10^3; the boundary is not removable
    SingularityReport rep = singularity_check(CombinedParams(10, 0.5, 1e-3));
    CHECK(rep.log_clumsy_flux == Catch::Approx(std::log(0.5) + 10.0 * std::log(0.5)).epsilon(1e-12));
    CHECK(rep.log_factor_gap == Catch::Approx(rep.log_mu_asym - rep.log_clumsy_flux).margin(1e-12));
    CHECK(std::fabs(rep.log_factor_gap) > 3.0 * std::log(10.0));
    // the blow-up side: 1/(S;S)_inf diverges as S -> 1, so the gap is upward
    CHECK(rep.log_factor_gap > 0.0);
}

TEST_CASE("one-block clump control at the pinned block") {
    CombinedParams par(6, 0.2, 0.5);
    CountKernel K = combined_kernel(par);
    StationaryDistribution nu = stationary_distribution(K);
    BlockMomentReport rep = block_entry_moments(K, nu, combined_completion_target(par), 200);
    CHECK(rep.ratio == Catch::Approx(0.00036180585616151466).epsilon(1e-8));
    CHECK(rep.ratio <= 2.0 * 200.0 * std::pow(0.5, 6));
}

TEST_CASE("simulator matches the kernel mean at a small size") {
    CombinedParams par(3, 0.2, 0.5);
    double exact = mean_hitting_time(combined_kernel(par), combined_completion_target(par), 0);
    const std::size_t N = 3000;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        Xoshiro256pp rng = stream_rng(kDefaultSeed, i);
        acc += static_cast<double>(simulate_combined_one(par, rng));
    }
    CHECK(std::fabs(acc / N - exact) < 5.0 * exact / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("general-path simulator also matches at S away from one half") {
    CombinedParams par(3, 0.2, 0.4);
    double exact = mean_hitting_time(combined_kernel(par), combined_completion_target(par), 0);
    const std::size_t N = 3000;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        Xoshiro256pp rng = stream_rng(kDefaultSeed, i);
        acc += static_cast<double>(simulate_combined_one(par, rng));
    }
    CHECK(std::fabs(acc / N - exact) < 5.0 * exact / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("budget cap raises") {
    CombinedParams par(6, 0.2, 0.5);
    Xoshiro256pp rng = stream_rng(kDefaultSeed, 1);
    CHECK_THROWS_AS(simulate_combined_one(par, rng, 3), BudgetExceeded);
}

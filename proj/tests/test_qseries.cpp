#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <couponflux/errors.hpp>
#include <couponflux/qseries.hpp>

using namespace couponflux;

TEST_CASE("partial pochhammer matches a direct product") {
    double a = 0.3;
    double direct = 0.0;
    for (int j = 1; j <= 5; ++j) direct += std::log(1.0 - std::pow(a, j));
    CHECK(log_q_pochhammer(a, 5) == Catch::Approx(direct).epsilon(1e-15));
    CHECK(log_q_pochhammer(a, 0) == 0.0);
}

TEST_CASE("infinite pochhammer at one half") {
    // prod_{j>=1} (1 - 2^-j), checked against a 300-term partial product and
    // an independently computed reference value
    double v = std::exp(log_q_pochhammer_inf(0.5));
    CHECK(v == Catch::Approx(0.2887880950866025).epsilon(1e-15));
    CHECK(log_q_pochhammer(0.5, 300) == Catch::Approx(log_q_pochhammer_inf(0.5)).margin(1e-15));
}

TEST_CASE("infinite pochhammer near one stays finite and monotone") {
    double prev = log_q_pochhammer_inf(0.1);
    for (double a : {0.3, 0.5, 0.7, 0.9, 0.99}) {
        double cur = log_q_pochhammer_inf(a);
        CHECK(cur < prev);
        CHECK(std::isfinite(cur));
        prev = cur;
    }
}

TEST_CASE("pochhammer rejects arguments outside (0,1)") {
    CHECK_THROWS_AS(log_q_pochhammer_inf(1.0), DomainError);
    CHECK_THROWS_AS(log_q_pochhammer_inf(-0.1), DomainError);
    CHECK_THROWS_AS(log_q_pochhammer_inf(0.0), DomainError);
}

TEST_CASE("lucky weight closed form agrees with the recursion") {
    int n = 50;
    double s = 0.6, r = 0.8;
    LuckyWeightTable t = make_lucky_weight_table(n, s, r);
    for (int k = 0; k <= n; ++k) {
        CHECK(log_lucky_weight(n, k, s, r) ==
              Catch::Approx(t.log_w[static_cast<std::size_t>(k)]).margin(1e-11));
    }
}

TEST_CASE("lucky weight special values") {
    // w_0 = 1 and w_1 = Q S for every n
    CHECK(log_lucky_weight(7, 0, 0.5, 0.8) == 0.0);
    CHECK(log_lucky_weight(7, 1, 0.5, 0.8) ==
          Catch::Approx(std::log(0.8 * 0.5)).epsilon(1e-14));
    // full-climb weight: (n!/n^n) Q^n S^{n(n+1)/2}
    int n = 6;
    double expect = std::lgamma(7.0) - 6.0 * std::log(6.0) + 6.0 * std::log(0.8) +
                    21.0 * std::log(0.5);
    CHECK(log_lucky_weight(n, n, 0.5, 0.8) == Catch::Approx(expect).epsilon(1e-13));
    CHECK_THROWS_AS(log_lucky_weight(5, 6, 0.5, 0.8), DomainError);
    CHECK_THROWS_AS(log_lucky_weight(5, -1, 0.5, 0.8), DomainError);
}

TEST_CASE("limiting count law is a proper distribution") {
    std::vector<double> pi = infinite_chain_stationary(0.5, 1.0, 40);
    double total = 0.0;
    for (double v : pi) total += v;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
    // P(0) is the infinite pochhammer at the survival parameter
    CHECK(pi[0] == Catch::Approx(std::exp(log_q_pochhammer_inf(0.5))).epsilon(1e-12));
}

TEST_CASE("limiting count law matches the alternating-series expansion") {
    // pi(k) = sum_{m>=k} (-1)^{m-k} C(m,k) Q^m S^{m(m+1)/2} / (S;S)_m
    double S = 0.5, Q = 1.0;
    std::vector<double> pi = infinite_chain_stationary(S, Q, 15);
    for (int k = 0; k <= 15; ++k) {
        double tot = 0.0;
        double binom = 1.0;  // C(m,k) built incrementally over m
        for (int m = k; m <= 200; ++m) {
            if (m > k)
                binom = binom * static_cast<double>(m) / static_cast<double>(m - k);
            double lt = std::log(binom) + m * std::log(Q) +
                        0.5 * static_cast<double>(m) * (m + 1) * std::log(S) -
                        log_q_pochhammer(S, m);
            double t = std::exp(lt);
            tot += (m - k) % 2 == 0 ? t : -t;
            if (m > k + 5 && t < 1e-25) break;
        }
        CHECK(pi[static_cast<std::size_t>(k)] == Catch::Approx(tot).margin(1e-14));
    }
}

TEST_CASE("limiting count law tail has the lucky-climb shape") {
    // pi(k) (S;S)_inf / S^{k(k+1)/2} tends to 1; at k = 20 the ratio is
    // already within 1.1e-5 of the limit
    std::vector<double> pi = infinite_chain_stationary(0.5, 1.0, 21);
    double r20 = pi[20] * std::exp(log_q_pochhammer_inf(0.5)) / std::exp(210.0 * std::log(0.5));
    CHECK(std::fabs(r20 - 1.0) == Catch::Approx(1.096722511784165e-05).margin(2e-8));
}

TEST_CASE("limiting count law is a fixed point of the limiting update") {
    // one step of (thin by Bin(k, S)) then (add Bern(Q S)) preserves the law;
    // truncation only pollutes the top two indices
    const int kmax = 30;
    double S = 0.5, Q = 1.0;
    std::vector<double> pi = infinite_chain_stationary(S, Q, kmax);
    std::vector<double> out(kmax + 2, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
        row[0] = std::pow(1.0 - S, k);
        for (int j = 1; j <= k; ++j)
            row[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j - 1)] *
                                               (S / (1.0 - S)) * static_cast<double>(k - j + 1) /
                                               static_cast<double>(j);
        double add = Q * S;
        for (int j = 0; j <= k; ++j) {
            out[static_cast<std::size_t>(j)] += pi[static_cast<std::size_t>(k)] *
                                                row[static_cast<std::size_t>(j)] * (1.0 - add);
            out[static_cast<std::size_t>(j) + 1] +=
                pi[static_cast<std::size_t>(k)] * row[static_cast<std::size_t>(j)] * add;
        }
    }
    for (int k = 0; k <= kmax - 2; ++k)
        CHECK(out[static_cast<std::size_t>(k)] ==
              Catch::Approx(pi[static_cast<std::size_t>(k)]).margin(1e-15));
}

TEST_CASE("log_gamma matches the standard library") {
    for (double x : {0.5, 1.0, 1.476, 3.0, 10.5, 41.0, 200.0}) {
        CHECK(log_gamma(x) == Catch::Approx(std::lgamma(x)).margin(1e-12));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "metacombine/special_functions.hpp"
#include "oracles.hpp"

using namespace metacombine;

TEST_CASE("norm_cdf hits the reference values") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // oracle::norm_cdf(1.959964) = 0.97500000090355760 (frozen)
    CHECK(norm_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(std::abs(norm_cdf(1.959964) - oracle::norm_cdf(1.959964)) < 1e-15);
    CHECK(norm_cdf(-2.345) == doctest::Approx(1.0 - norm_cdf(2.345)).epsilon(1e-14));
}

TEST_CASE("norm_cdf tracks the series/continued-fraction oracle") {
    for (double x = -10.0; x <= 10.0; x += 0.173)
        CHECK(std::abs(norm_cdf(x) - oracle::norm_cdf(x)) < 1e-14);
}

TEST_CASE("norm_cdf is monotone and symmetric") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(gen);
        const double b = u(gen);
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(norm_cdf(lo) <= norm_cdf(hi));
        CHECK(norm_cdf(a) + norm_cdf(-a) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("norm_quantile basics") {
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    // Appendix pseudo-count constant: qnorm(0.9995)^2 = 10.8275661706627
    const double z = norm_quantile(0.9995);
    CHECK(z * z == doctest::Approx(10.8).epsilon(0.05 / 10.8));
    CHECK(z * z == doctest::Approx(10.827566170662732).epsilon(1e-10));
    CHECK(norm_quantile(norm_cdf(1.2345)) == doctest::Approx(1.2345).epsilon(1e-10));
    CHECK(std::isinf(norm_quantile(0.0)));
    CHECK(norm_quantile(0.0) < 0.0);
    CHECK(std::isinf(norm_quantile(1.0)));
    CHECK(norm_quantile(1.0) > 0.0);
    CHECK_THROWS_AS((void)norm_quantile(-0.1), std::invalid_argument);
}

TEST_CASE("norm_quantile inverts norm_cdf and increases strictly") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(1e-12, 1.0 - 1e-12);
    double prev_p = -1.0, prev_q = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double p = u(gen);
        const double q = norm_quantile(p);
        CHECK(std::abs(norm_cdf(q) - p) < 1e-12);
        if (prev_p >= 0.0 && p != prev_p)
            CHECK((p < prev_p) == (q < prev_q));
        prev_p = p;
        prev_q = q;
    }
    // well into the tails the defining identity still holds in absolute terms
    for (double p : {1e-30, 1e-100, 1e-300})
        CHECK(std::abs(norm_cdf(norm_quantile(p)) - p) < 1e-12);
}

TEST_CASE("norm_logcdf agrees with log(norm_cdf) and extends past underflow") {
    for (double x = -36.0; x <= 8.0; x += 0.37)
        CHECK(norm_logcdf(x) == doctest::Approx(std::log(oracle::norm_cdf(x))).epsilon(1e-11));
    // beyond erfc underflow the asymptotic keeps decreasing smoothly
    CHECK(norm_logcdf(-38.0) < norm_logcdf(-37.5));
    CHECK(norm_logcdf(-40.0) == doctest::Approx(-0.5 * 1600.0).epsilon(1e-2));
}

TEST_CASE("norm_interval_prob equals the CDF difference") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-9.0, 9.0);
    for (int i = 0; i < 500; ++i) {
        double a = u(gen), b = u(gen);
        if (a > b) std::swap(a, b);
        const double want = oracle::norm_cdf(b) - oracle::norm_cdf(a);
        CHECK(std::abs(norm_interval_prob(a, b) - want) < 1e-15);
    }
    CHECK(norm_interval_prob(2.0, 1.0) == 0.0);
}

TEST_CASE("chisq_sf_even closed forms") {
    CHECK(chisq_sf_even(2, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // Whitlock's example: survival of chi-square_4 at -2 log(0.02^2)
    CHECK(chisq_sf_even(4, 15.6481) == doctest::Approx(0.00353).epsilon(0.0001 / 0.00353));
    CHECK(chisq_sf_even(16, 0.0) == 1.0);
    CHECK(chisq_sf_even(4, std::numeric_limits<double>::infinity()) == 0.0);
    CHECK_THROWS_AS((void)chisq_sf_even(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)chisq_sf_even(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)chisq_sf_even(4, -1.0), std::invalid_argument);
}

TEST_CASE("chisq_sf_even(2, a) is exactly exp(-a/2)") {
    for (double a = 0.0; a <= 60.0; a += 0.61)
        CHECK(std::abs(chisq_sf_even(2, a) - std::exp(-0.5 * a)) < 1e-13);
}

TEST_CASE("chisq_sf_even matches the recurrence oracle across df") {
    for (int df = 2; df <= 40; df += 2)
        for (double a = 0.1; a < 120.0; a *= 1.7)
            CHECK(chisq_sf_even(df, a) ==
                  doctest::Approx(oracle::chisq_sf(df, a)).epsilon(1e-12));
}

TEST_CASE("chisq_quantile_even reference points") {
    CHECK(chisq_quantile_even(2, 0.95) ==
          doctest::Approx(5.991464547107982).epsilon(1e-8 / 6.0));
    CHECK(chisq_quantile_even(2, 0.95) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-9));
    CHECK(chisq_quantile_even(8, 0.0) == 0.0);
    CHECK(chisq_quantile_even(16, 0.99) == doctest::Approx(31.999926908815181).epsilon(1e-9));
    const double a = 7.7;
    CHECK(chisq_quantile_even(6, 1.0 - chisq_sf_even(6, a)) == doctest::Approx(a).epsilon(1e-8 / a));
}

TEST_CASE("quantile/survival roundtrip across even df") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int df : {2, 4, 8, 16, 32}) {
        for (int i = 0; i < 250; ++i) {
            const double a = -2.0 * std::log(1.0 - u(gen)) * df;  // spread over the support
            const double p = 1.0 - chisq_sf_even(df, a);
            // past this point 1-p cannot carry the survival value back
            if (p >= 1.0 - 1e-8) continue;
            CHECK(chisq_quantile_even(df, p) == doctest::Approx(a).epsilon(1e-8));
        }
    }
}

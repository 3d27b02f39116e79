#include <doctest.h>

#include <cmath>

#include "gesched/mathx.hpp"
#include "gesched/stats.hpp"

using namespace gesched;

TEST_CASE("erfc_inv against high-precision references") {
    const struct { double y, ref; } table[] = {
        {1e-100, 15.065574702592645704},
        {1e-20, 6.6015806223551425615},
        {1e-10, 4.5728249673894852787},
        {0.0002, 2.6297417762102729206},
        {0.002, 2.1851242191330042657},
        {0.02, 1.6449763571331870502},
        {0.15, 1.0179024648320276436},
        {0.5, 0.47693627620446987338},
        {1.5, -0.47693627620446987338},
        {1.85, -1.0179024648320276436},
        {1.9998, -2.6297417762102729206},
    };
    for (const auto& row : table) {
        INFO("y = " << row.y);
        CHECK(mathx::erfc_inv(row.y) ==
              doctest::Approx(row.ref).epsilon(1e-14));
    }
    CHECK(mathx::erfc_inv(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS(mathx::erfc_inv(0.0));
    CHECK_THROWS(mathx::erfc_inv(2.5));
}

TEST_CASE("normal cdf/sf identities") {
    for (const double x : {-8.0, -3.2, -0.5, 0.0, 0.7, 2.4, 6.0}) {
        CHECK(mathx::norm_cdf(x) + mathx::norm_sf(x) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(mathx::norm_cdf(-x) == doctest::Approx(mathx::norm_sf(x)).epsilon(1e-14));
    }
    CHECK(mathx::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-16));
    // tail value vs the classical Mills-ratio asymptotic
    const double x = 7.0;
    const double mills = mathx::norm_pdf(x) / x * (1.0 - 1.0 / (x * x) + 3.0 / std::pow(x, 4));
    CHECK(mathx::norm_sf(x) == doctest::Approx(mills).epsilon(1e-3));
}

TEST_CASE("norm_quantile roundtrip") {
    for (const double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-10}) {
        const double x = mathx::norm_quantile(p);
        CHECK(mathx::norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("brent finds bracketed roots") {
    const double r = mathx::brent([](double x) { return x * x - 2.0; }, 0.0, 2.0, 0.0, 0.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS(mathx::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12, 0.0));
}

TEST_CASE("adaptive quadrature on known integrals") {
    const double g = mathx::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
    CHECK(g == doctest::Approx(std::sqrt(3.141592653589793)).epsilon(1e-11));
    const double s = mathx::integrate([](double x) { return std::sin(x); }, 0.0, 3.141592653589793, 1e-10);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("chi-square survival sanity") {
    // known quantiles: P(chi2_1 > 6.635) ~ 0.01, P(chi2_5 > 15.086) ~ 0.01
    CHECK(stats::chi2_sf(6.634896601021214, 1) == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(stats::chi2_sf(15.08627246938899, 5) == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(stats::chi2_sf(0.0, 3) == 1.0);
}

TEST_CASE("ks p-value calibration") {
    // for large n, D = 1.63/sqrt(n) should give p close to 0.01
    CHECK(stats::ks_p_value(1.6276 / std::sqrt(2000.0), 2000) ==
          doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("poisson pmf normalizes") {
    double s = 0.0;
    for (unsigned k = 0; k < 60; ++k) s += stats::poisson_pmf(k, 3.7);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

#include <doctest.h>

#include <cmath>

#include "gesched/errors.hpp"
#include "gesched/qmodel2.hpp"

using namespace gesched;
using namespace gesched::qmodel2;

TEST_CASE("backlogged collision probability") {
    CHECK(p_coll_backlogged(1) == 0.0);
    CHECK(p_coll_backlogged(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::fabs(p_coll_backlogged(1e6) - (1.0 - std::exp(-1.0))) < 1e-6);
}

TEST_CASE("collision fixed point: residual, oracle, bounds, monotonicity") {
    CHECK(solve_p_coll(0.0, 1.0) == 0.0);

    // residual of the defining equation < 1e-12
    for (const double lam : {0.05, 0.15, 0.3}) {
        const double p = solve_p_coll(lam, 1.0);
        CHECK(std::fabs(p - (1.0 - std::exp(-lam / ((1.0 - p) * 1.0)))) < 1e-12);
    }

    // bisection oracle on f(p) = p - 1 + exp(-lambda/((1-p) tau))
    {
        const double lam = 0.3, tau = 1.0;
        double lo = 0.0, hi = 1.0 - lam / tau - 1e-9;
        auto f = [&](double p) { return p - 1.0 + std::exp(-lam / ((1.0 - p) * tau)); };
        // smallest root: f(0) < 0, walk up to the first sign change
        double step = hi / 4096.0, x = 0.0;
        while (x + step <= hi && f(x + step) < 0.0) x += step;
        lo = x;
        hi = x + step;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        CHECK(solve_p_coll(lam, tau) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
    }

    // bounded by the backlogged probability, monotone in lambda and tau
    for (const double K : {10.0, 50.0, 500.0}) {
        double prev = -1.0;
        for (const double lam : {0.02, 0.1, 0.2, 0.3}) {
            const double p = solve_p_coll(lam / K, 1.0 / K, K);
            CHECK(p <= p_coll_backlogged(K) + 1e-12);
            CHECK(p > prev);
            prev = p;
        }
    }
    CHECK(solve_p_coll(0.2, 1.0) > solve_p_coll(0.2, 2.0));

    // finite-K solution approaches the exponential form
    CHECK(std::fabs(solve_p_coll(0.25, 1.0, 1e4) - solve_p_coll(0.25, 1.0)) < 1e-3);

    // overload
    CHECK_THROWS_AS(solve_p_coll(0.5, 1.0), model_error); // 0.5 > 1/e
}

TEST_CASE("empty queue probability") {
    CHECK(empty_prob(0.0, 1.0, 0.2) == 1.0);
    const double pc = 0.3;
    CHECK(empty_prob(0.5 * (1.0 - pc) * 2.0, 2.0, pc) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(empty_prob(1.0, 1.0, 0.5), model_error);
}

TEST_CASE("metrics of the effective-rate queue") {
    // p_coll = 0 reduces to the plain single queue at rate tau
    const auto m = metrics_model2(0.0, 2.0);
    CHECK(m.p_coll == 0.0);
    CHECK(m.service_time == doctest::Approx(0.5).epsilon(1e-12));

    const auto m2 = metrics_model2(0.2, 1.0);
    CHECK(m2.sojourn == doctest::Approx(m2.wait + m2.service_time).epsilon(1e-12));
    CHECK(m2.queue_len == doctest::Approx(0.2 * m2.sojourn).epsilon(1e-12));

    // heavy traffic blows up the waiting time
    const auto light = metrics_model2(0.01, 1.0);
    const auto heavy = metrics_model2(0.3667, 1.0);
    CHECK(heavy.wait > 10.0 * light.wait);
}

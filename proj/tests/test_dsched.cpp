#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "gesched/channel.hpp"
#include "gesched/dsched.hpp"
#include "gesched/mathx.hpp"
#include "gesched/rng.hpp"
#include "gesched/sim.hpp"
#include "gesched/stats.hpp"

using namespace gesched;
using channel::ChannelModel;

namespace {
const ChannelModel kFigModel{0.1, 0.1, std::sqrt(2.0), 0.5, 0.0, 0.3};
}

TEST_CASE("asymptotic threshold is b_K and nearly solves the design equation") {
    for (const double K : {100.0, 5000.0, 1e5}) {
        const auto plan = dsched::threshold_asymptotic(K, kFigModel);
        CHECK(plan.u == evt::norm_constants_mixture(K, kFigModel).b_K);
        CHECK(std::fabs(channel::mixture_sf(plan.u, kFigModel) - 1.0 / K) < 2.0 / K);
        CHECK(plan.method == dsched::ThresholdMethod::AsymptoticMixture);
    }
    // p = 1 collapse to the Gaussian asymptotic level
    const ChannelModel good_only{0.0, 0.3, std::sqrt(2.0), 0.5, 0.0, 0.3};
    CHECK(dsched::threshold_asymptotic(1000, good_only).u ==
          doctest::Approx(evt::norm_constants_gaussian(1000, std::sqrt(2.0), 0.5).b_K)
              .epsilon(1e-15));
}

TEST_CASE("exact threshold solves 1 - H(u) = 1/K to 1e-12") {
    for (const double K : {10.0, 100.0, 1e4}) {
        const auto plan = dsched::threshold_exact(K, kFigModel);
        CHECK(std::fabs(channel::mixture_sf(plan.u, kFigModel) - 1.0 / K) < 1e-12);
    }
    // exact and asymptotic get relatively closer as K grows
    const double u100 = dsched::threshold_exact(100, kFigModel).u;
    const double a100 = dsched::threshold_asymptotic(100, kFigModel).u;
    const double u1e5 = dsched::threshold_exact(1e5, kFigModel).u;
    const double a1e5 = dsched::threshold_asymptotic(1e5, kFigModel).u;
    CHECK(std::fabs(u1e5 - a1e5) / u1e5 < std::fabs(u100 - a100) / u100);
    // symmetric two-sided mixture: the K = 2 threshold is the center
    const ChannelModel sym{0.1, 0.1, 1.0, 0.4, -1.0, 0.4};
    CHECK(dsched::threshold_exact(2, sym).u == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("refined Gaussian threshold") {
    CHECK(dsched::threshold_refined_gaussian(2, 1.3, 0.7).u == doctest::Approx(1.3).epsilon(1e-14));
    const auto p1000 = dsched::threshold_refined_gaussian(1000, 1.3, 0.7);
    CHECK(std::fabs(mathx::norm_sf((p1000.u - 1.3) / 0.7) - 1e-3) < 1e-12);
    // bisection oracle on Phi
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mathx::norm_sf(mid) > 0.01 ? lo : hi) = mid;
    }
    CHECK(dsched::threshold_refined_gaussian(100, 0.0, 1.0).u ==
          doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("utilization probability") {
    CHECK(dsched::utilization_prob(1) == 1.0);
    CHECK(dsched::utilization_prob(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::fabs(dsched::utilization_prob(1e6) - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("distributed capacity: ratio, conditional mean, monotonicity") {
    const auto d1e5 = dsched::expected_capacity_distributed(1e5, kFigModel);
    const double ratio = d1e5.value / evt::expected_capacity_centralized(1e5, kFigModel);
    CHECK(std::fabs(ratio - std::exp(-1.0)) < 0.02);
    CHECK(dsched::expected_capacity_distributed(1e3, kFigModel).value <
          dsched::expected_capacity_distributed(1e4, kFigModel).value);
    CHECK(d1e5.utilization_finite_k == doctest::Approx(dsched::utilization_prob(1e5)));

    // conditional mean term u + 1/a_K: MC estimate of E[C | C > u] at K = 5000
    // vs the exact conditional mean (quadrature), and the exact vs the
    // asymptotic term within the paper's o(1/a_K) allowance.
    const auto d5k = dsched::expected_capacity_distributed(5000, kFigModel);
    const double u = d5k.threshold;
    const double sf_u = channel::mixture_sf(u, kFigModel);
    const double exact_cond =
        mathx::integrate([&](double x) { return x * channel::mixture_pdf(x, kFigModel); }, u,
                         u + 4.0, 1e-12) /
        sf_u;
    const double a_K = evt::norm_constants_mixture(5000, kFigModel).a_K;
    CHECK(std::fabs(exact_cond - d5k.conditional_mean) < 0.25 / a_K);

    rng::Stream rs(31);
    double acc = 0.0, acc2 = 0.0;
    int hits = 0;
    const int n = 6000000;
    for (int i = 0; i < n; ++i) {
        const auto s = channel::stationary_draw(kFigModel, rs);
        const double c = channel::sample_capacity(s, kFigModel, rs);
        if (c > u) {
            acc += c;
            acc2 += c * c;
            ++hits;
        }
    }
    REQUIRE(hits > 100);
    const double mc = acc / hits;
    const double sd = std::sqrt(acc2 / hits - mc * mc);
    CHECK(std::fabs(mc - exact_cond) < 3.0 * sd / std::sqrt(double(hits)));
}

TEST_CASE("level_for_rate") {
    const auto c = evt::norm_constants_gaussian(1e6, 0.3, 1.2);
    CHECK(dsched::level_for_rate(1.0, 1e6, 0.3, 1.2) == c.b_K);
    const double u = dsched::level_for_rate(0.5, 1e6, 0.3, 1.2);
    CHECK(1e6 * mathx::norm_sf((u - 0.3) / 1.2) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(dsched::level_for_rate(0.1, 1e4, 0.0, 1.0) > dsched::level_for_rate(1.0, 1e4, 0.0, 1.0));
}

TEST_CASE("affine equivariance of thresholds") {
    const double c = 2.25;
    const ChannelModel shifted{0.1, 0.1, std::sqrt(2.0) + c, 0.5, 0.0 + c, 0.3};
    for (const double K : {50.0, 5000.0}) {
        CHECK(dsched::threshold_exact(K, shifted).u ==
              doctest::Approx(dsched::threshold_exact(K, kFigModel).u + c).epsilon(1e-11));
        CHECK(dsched::threshold_asymptotic(K, shifted).u ==
              doctest::Approx(dsched::threshold_asymptotic(K, kFigModel).u + c).epsilon(1e-13));
    }
    CHECK(dsched::threshold_refined_gaussian(100, 1.0 + c, 0.7).u ==
          doctest::Approx(dsched::threshold_refined_gaussian(100, 1.0, 0.7).u + c).epsilon(1e-13));
}

TEST_CASE("strong mixing bound decays geometrically") {
    // g(k) = sum_{i,j} pi_i |P^k_ij - pi_j| for the 2-state chain
    const double alpha = 0.15, beta = 0.35;
    const double p = beta / (alpha + beta), q = 1.0 - p;
    auto gk = [&](int k) {
        // closed-form 2-state k-step matrix via eigenvalue r = 1 - a - b
        const double r = std::pow(1.0 - alpha - beta, k);
        const double m[2][2] = {{p + q * r, q - q * r}, {p - p * r, q + p * r}};
        const double pi[2] = {p, q};
        double g = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g += pi[i] * std::fabs(m[i][j] - pi[j]);
        return g;
    };
    const double rate = std::fabs(1.0 - alpha - beta);
    for (int k = 1; k <= 16; k *= 2)
        CHECK(gk(2 * k) / gk(k) == doctest::Approx(std::pow(rate, k)).epsilon(1e-9));
    CHECK(gk(64) < 1e-12);
}

TEST_CASE("chain-dependent exceedances are Poisson at the PPA level") {
    // level u_n(tau) for the mixture at n = 1e4; counts per window of n slots
    const double n = 1e4;
    const auto norm = evt::norm_constants_mixture(n, kFigModel);
    const double tau = 1.0;
    const double level = std::log(1.0 / tau) / norm.a_K + norm.b_K;
    const double tau_exact = n * channel::mixture_sf(level, kFigModel);

    sim::SimConfig cfg;
    cfg.model = kFigModel;
    cfg.capacity_mode = sim::CapacityMode::ChainDependent;
    cfg.seed = 404;
    const auto res = sim::exceedance_counts(cfg, level, int(n), 4000);
    std::vector<double> obs(res.histogram.size()), expd(res.histogram.size());
    for (std::size_t k = 0; k < res.histogram.size(); ++k) {
        obs[k] = double(res.histogram[k]);
        expd[k] = double(res.windows) * stats::poisson_pmf(unsigned(k), tau_exact);
    }
    const auto gof = stats::chi2_test(obs, expd, 0.01);
    CHECK(gof.pass);
}

TEST_CASE("thinning exceedance events stays Poisson") {
    const double n = 1e4;
    const double level = dsched::level_for_rate(1.0, n, 0.0, 1.0);
    const double tau_exact = n * mathx::norm_sf(level);
    sim::SimConfig cfg;
    cfg.model = {0.1, 0.1, 0.0, 1.0, -9.0, 0.5};
    cfg.capacity_mode = sim::CapacityMode::IIDGaussian;
    cfg.seed = 505;
    const int windows = 3000;
    rng::Stream thin_rs(99);
    const double rho = 0.4;
    std::vector<double> obs;
    for (int w = 0; w < windows; ++w) {
        sim::SimConfig c1 = cfg;
        c1.seed = cfg.seed + uint64_t(w);
        const auto r = sim::exceedance_counts(c1, level, int(n), 1);
        const auto kept = sim::thin_events(r.first_window_events, rho, thin_rs);
        if (kept.size() >= obs.size()) obs.resize(kept.size() + 1, 0.0);
        obs[kept.size()] += 1.0;
    }
    std::vector<double> expd(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k)
        expd[k] = windows * stats::poisson_pmf(unsigned(k), rho * tau_exact);
    const auto gof = stats::chi2_test(obs, expd, 0.01);
    CHECK(gof.pass);
}

#include "gesched/evt.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/mathx.hpp"

namespace gesched::evt {

namespace {
constexpr double kFourPi = 12.566370614359172;

GumbelNorm constants(double K, double mu, double sigma, double log_term) {
    const double l = std::log(K);
    const double root = std::sqrt(2.0 * l);
    GumbelNorm n;
    n.K = K;
    n.a_K = root / sigma;
    n.b_K = sigma * (root - (std::log(l) + log_term) / (2.0 * root)) + mu;
    return n;
}
} // namespace

GumbelNorm norm_constants_mixture(double K, const channel::ChannelModel& m) {
    if (!(K >= 3.0))
        throw std::invalid_argument("norm_constants_mixture: K must be >= 3 (log log K > 0)");
    const auto [p, q] = channel::stationary_state_probs(m);
    (void)q;
    if (p <= 0.0)
        throw model_error("norm_constants_mixture: p = 0, good group empty (formula has 1/p^2)");
    return constants(K, m.mu_g, m.sigma_g, std::log(kFourPi / (p * p)));
}

GumbelNorm norm_constants_gaussian(double K, double mu, double sigma) {
    if (!(K >= 3.0))
        throw std::invalid_argument("norm_constants_gaussian: K must be >= 3");
    if (!(sigma > 0.0)) throw std::invalid_argument("norm_constants_gaussian: sigma <= 0");
    return constants(K, mu, sigma, std::log(kFourPi));
}

double gumbel_cdf(double x, const GumbelNorm& n) {
    return std::exp(-std::exp(-n.a_K * (x - n.b_K)));
}

double gumbel_pdf(double x, const GumbelNorm& n) {
    const double z = -n.a_K * (x - n.b_K);
    return n.a_K * std::exp(z - std::exp(z));
}

double gumbel_mean(const GumbelNorm& n) { return n.b_K + mathx::kEulerGamma / n.a_K; }

double expected_capacity_centralized(double K, const channel::ChannelModel& m) {
    return gumbel_mean(norm_constants_mixture(K, m));
}

double expected_capacity_good_only(double K, const channel::ChannelModel& m) {
    const auto [p, q] = channel::stationary_state_probs(m);
    (void)q;
    const double effective = p * K;
    if (!(effective >= 3.0))
        throw std::invalid_argument("expected_capacity_good_only: p*K must be >= 3");
    return gumbel_mean(norm_constants_gaussian(effective, m.mu_g, m.sigma_g));
}

double reciprocal_hazard(double t, const channel::ChannelModel& m) {
    const double f = channel::mixture_pdf(t, m);
    if (!(f >= 1e-300))
        throw model_error("reciprocal_hazard: density underflow, evaluation limit reached");
    return channel::mixture_sf(t, m) / f;
}

} // namespace gesched::evt

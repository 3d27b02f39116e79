#include "gesched/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/kernels.hpp"
#include "gesched/mathx.hpp"

namespace gesched::channel {

void ChannelModel::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("ChannelModel: alpha, beta must lie in [0, 1]");
    if (alpha == 0.0 && beta == 0.0)
        throw std::invalid_argument("ChannelModel: alpha = beta = 0 gives a non-ergodic chain");
    if (!(sigma_g > 0.0) || !(sigma_b > 0.0))
        throw std::invalid_argument("ChannelModel: sigma_g and sigma_b must be positive");
    if (!(sigma_g > sigma_b || (sigma_g == sigma_b && mu_g > mu_b)))
        throw std::invalid_argument(
            "ChannelModel: requires sigma_g > sigma_b, or sigma_g == sigma_b with mu_g > mu_b");
}

bool ChannelModel::good_tail_dominates() const {
    return sigma_g > sigma_b ? mu_g >= mu_b : mu_g > mu_b;
}

std::pair<double, double> stationary_state_probs(const ChannelModel& m) {
    const double s = m.alpha + m.beta;
    if (s <= 0.0) throw model_error("stationary_state_probs: alpha + beta = 0, chain not ergodic");
    return {m.beta / s, m.alpha / s};
}

double mixture_cdf(double t, const ChannelModel& m) {
    const auto [p, q] = stationary_state_probs(m);
    return p * mathx::norm_cdf((t - m.mu_g) / m.sigma_g) +
           q * mathx::norm_cdf((t - m.mu_b) / m.sigma_b);
}

double mixture_sf(double t, const ChannelModel& m) {
    const auto [p, q] = stationary_state_probs(m);
    return p * mathx::norm_sf((t - m.mu_g) / m.sigma_g) +
           q * mathx::norm_sf((t - m.mu_b) / m.sigma_b);
}

double mixture_pdf(double t, const ChannelModel& m) {
    const auto [p, q] = stationary_state_probs(m);
    return p / m.sigma_g * mathx::norm_pdf((t - m.mu_g) / m.sigma_g) +
           q / m.sigma_b * mathx::norm_pdf((t - m.mu_b) / m.sigma_b);
}

double mixture_quantile(double prob, const ChannelModel& m) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::domain_error("mixture_quantile: prob outside (0, 1)");
    const auto [p, q] = stationary_state_probs(m);
    // starting bracket from the per-component quantiles
    const double zq = mathx::norm_quantile(prob);
    double lo = std::fmin(m.mu_g + zq * m.sigma_g, m.mu_b + zq * m.sigma_b);
    double hi = std::fmax(m.mu_g + zq * m.sigma_g, m.mu_b + zq * m.sigma_b);
    if (p == 0.0) { lo = hi = m.mu_b + zq * m.sigma_b; }
    if (q == 0.0) { lo = hi = m.mu_g + zq * m.sigma_g; }
    double w = std::fmax(1.0, 0.1 * (hi - lo));
    lo -= 1e-9; hi += 1e-9;
    // Tail-accurate objective: solve in survival space above the median.
    const bool upper = prob >= 0.5;
    auto f = [&](double t) {
        return upper ? (1.0 - prob) - mixture_sf(t, m) : mixture_cdf(t, m) - prob;
    };
    for (int i = 0; i < 200 && f(lo) > 0.0; ++i) { lo -= w; w *= 2.0; }
    w = std::fmax(1.0, 0.1 * (hi - lo));
    for (int i = 0; i < 200 && f(hi) < 0.0; ++i) { hi += w; w *= 2.0; }
    return mathx::brent(f, lo, hi, 0.0, 1e-13, 300);
}

UserState step_state(UserState s, const ChannelModel& m, rng::Stream& rng) {
    const double u = rng.next_u01();
    if (s == UserState::Good) return u < m.alpha ? UserState::Bad : UserState::Good;
    return u < m.beta ? UserState::Good : UserState::Bad;
}

UserState stationary_draw(const ChannelModel& m, rng::Stream& rng) {
    const auto [p, q] = stationary_state_probs(m);
    (void)q;
    return rng.next_u01() < p ? UserState::Good : UserState::Bad;
}

double sample_capacity(UserState s, const ChannelModel& m, rng::Stream& rng) {
    const double z = kern::ndtri(rng.next_u01());
    return s == UserState::Good ? std::fma(m.sigma_g, z, m.mu_g)
                                : std::fma(m.sigma_b, z, m.mu_b);
}

} // namespace gesched::channel

#pragma once

#include <utility>

#include "gesched/rng.hpp"

namespace gesched::channel {

enum class UserState : unsigned char { Good = 0, Bad = 1 };

// Gilbert-Elliott channel: per-slot two-state Markov dynamics with a
// Gaussian capacity law per state. Capacity values are unitless "capacity
// units" throughout; nothing here fixes nats vs bits.
struct ChannelModel {
    double alpha;   // P(Good -> Bad) per slot
    double beta;    // P(Bad -> Good) per slot
    double mu_g, sigma_g;
    double mu_b, sigma_b;

    // Throws std::invalid_argument if the invariants fail.
    void validate() const;

    // The asymptotic formulas assume the good-state tail dominates; this is
    // true when sigma_g > sigma_b, or sigma_g == sigma_b and mu_g > mu_b
    // with mu_g >= mu_b. The model is accepted either way, callers may warn.
    bool good_tail_dominates() const;
};

// (p, q) = (beta, alpha) / (alpha + beta). Throws on alpha = beta = 0.
std::pair<double, double> stationary_state_probs(const ChannelModel& m);

// Stationary capacity law: p*F_g + q*F_b and friends.
double mixture_cdf(double t, const ChannelModel& m);
double mixture_sf(double t, const ChannelModel& m);   // 1 - cdf, tail-accurate
double mixture_pdf(double t, const ChannelModel& m);

// Inverse of mixture_cdf by bracketing; |cdf(t) - prob| <= 1e-12.
double mixture_quantile(double prob, const ChannelModel& m);

UserState step_state(UserState s, const ChannelModel& m, rng::Stream& rng);
UserState stationary_draw(const ChannelModel& m, rng::Stream& rng);
double sample_capacity(UserState s, const ChannelModel& m, rng::Stream& rng);

} // namespace gesched::channel

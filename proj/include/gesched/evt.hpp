#pragma once

#include "gesched/channel.hpp"

namespace gesched::evt {

// Gumbel normalizing constants: P{a_K (M_K - b_K) <= x} -> exp(-e^-x).
// a_K is the inverse scale (1/capacity units), b_K the location.
struct GumbelNorm {
    double a_K;
    double b_K;
    double K;
};

// Constants for the maximum of K draws from the stationary Gaussian mixture:
//   a_K = sqrt(2 log K) / sigma_g
//   b_K = sigma_g (sqrt(2 log K) - (log log K + log(4 pi / p^2)) / (2 sqrt(2 log K))) + mu_g
// Requires K >= 3 and p > 0.
GumbelNorm norm_constants_mixture(double K, const channel::ChannelModel& m);

// Textbook constants for K iid Gaussians with parameters (mu, sigma).
GumbelNorm norm_constants_gaussian(double K, double mu, double sigma);

double gumbel_cdf(double x, const GumbelNorm& n);
double gumbel_pdf(double x, const GumbelNorm& n);
double gumbel_mean(const GumbelNorm& n); // b_K + gamma / a_K

// E[max of K users] under centralized best-user scheduling.
double expected_capacity_centralized(double K, const channel::ChannelModel& m);

// Same, scheduling only the good group of effective size p*K.
double expected_capacity_good_only(double K, const channel::ChannelModel& m);

// Reciprocal hazard (1 - H(t)) / h(t) of the mixture; its derivative tending
// to 0 is the numeric signature of the Type I domain of attraction.
double reciprocal_hazard(double t, const channel::ChannelModel& m);

} // namespace gesched::evt

#pragma once

#include <Eigen/Dense>

#include "gesched/channel.hpp"

namespace gesched::groups {

// Group-size Markov chain: state i means i users see a Bad channel and K-i a
// Good one. P is (K+1)x(K+1); an entry sums the binomial ways the two
// opposing migration counts can produce the state change.
struct SystemChain {
    int K;
    double alpha, beta;
    Eigen::MatrixXd P;
};

SystemChain transition_matrix(int K, double alpha, double beta);

// Unique stationary vector of the chain. Dense solve up to K = 2000, power
// iteration above. Throws model_error when the chain is not ergodic
// (alpha = beta = 0, or alpha = beta = 1).
Eigen::VectorXd stationary_chain(const SystemChain& chain);

// P(max over both groups <= x) given k_bad bad users and k_good good users.
// Groups of size <= phi use the exact power F^k; larger groups the Gumbel
// approximation with the textbook Gaussian constants.
double two_group_max_cdf(double x, int k_bad, int k_good,
                         const channel::ChannelModel& m, int phi);
double two_group_max_pdf(double x, int k_bad, int k_good,
                         const channel::ChannelModel& m, int phi);

// Expected best-user capacity, averaging the conditional expectations over
// the stationary group-size distribution. Quadrature tolerance 1e-8.
double expected_capacity_by_state(int K, const channel::ChannelModel& m, int phi = 30);

// Mode lower bound 2 pi_{K/2} (b_{K/2} + gamma / a_{K/2}); symmetric
// (alpha == beta) even-K case only, with good-state Gaussian constants.
double capacity_lower_bound_mode(int K, const channel::ChannelModel& m);

struct DeltaBound {
    double sum;           // sum_{i=K/2-delta}^{K/2} (b_i + gamma/a_i) pi_i
    double final_display; // (b_{K/2-delta} + gamma/a_{K/2-delta}) pi_{K/2-delta} delta
};

DeltaBound capacity_lower_bound_delta(int K, const channel::ChannelModel& m, int delta);

} // namespace gesched::groups

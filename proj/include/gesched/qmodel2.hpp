#pragma once

#include <optional>

namespace gesched::qmodel2 {

// Decoupling by constant collision probability: each queue becomes a single
// birth-death queue with arrival rate lambda and effective service rate
// (1 - p_coll) * tau, tau being the threshold-exceedance rate.

// Collision probability when every user is backlogged: 1 - (1 - 1/K)^(K-1).
double p_coll_backlogged(double K);

// Fixed point of p = 1 - exp(-lambda / ((1-p) tau)) (K absent) or the
// finite-K form 1 - (1 - lambda / (K tau (1-p)))^(K-1). Returns the smaller,
// stable root; throws model_error when the load admits none.
double solve_p_coll(double lambda, double tau, std::optional<double> K = std::nullopt);

// P(queue empty) = 1 - lambda / ((1 - p_coll) tau).
double empty_prob(double lambda, double tau, double p_coll);

struct Metrics {
    double p_coll;
    double p_succ;
    double service_time; // 1 / ((1 - p_coll) tau)
    double wait;         // waiting time before service
    double sojourn;      // wait + service
    double queue_len;    // mean number in system
};

Metrics metrics_model2(double lambda, double tau, std::optional<double> K = std::nullopt);

} // namespace gesched::qmodel2

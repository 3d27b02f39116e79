#pragma once

#include <array>
#include <utility>
#include <vector>

namespace gesched::qmodel3 {

// Markov-modulated single queue: Poisson arrivals at rate lambda, service
// (threshold exceedance) at rate mu_g or mu_b following a two-state
// continuous-time channel with switch rates alpha (g->b) and beta (b->g).
// Collisions thin the service rates to mu' = mu * p_succ.
struct TDQueueParams {
    double lambda;
    double mu_g, mu_b;         // raw exceedance rates
    double alpha, beta;        // state switch rates
    double p_succ = 1.0;       // collision survival probability

    double mu_g_eff() const { return mu_g * p_succ; }
    double mu_b_eff() const { return mu_b * p_succ; }
    double pi_g() const { return beta / (alpha + beta); }
    double pi_b() const { return alpha / (alpha + beta); }
    double mu_hat() const { return pi_g() * mu_g_eff() + pi_b() * mu_b_eff(); }

    void validate() const;
};

// Coefficients (c3, c2, c1, c0) of the cubic g(z) whose root in (0,1) closes
// the generating functions.
std::array<double, 4> cubic_coeffs(const TDQueueParams& p);

double eval_cubic(const std::array<double, 4>& c, double z);

// The admissible root: real, in (0,1), empty-queue probabilities in range,
// generating functions nonnegative on a grid. Throws model_error when zero
// or several roots qualify (all roots are reported in the message).
double solve_z0(const TDQueueParams& p);

// pi^g_0, pi^b_0 - probability of (state, empty queue).
std::pair<double, double> empty_probs(const TDQueueParams& p, double z0);

// Queue-length probabilities pi^g_m, pi^b_m for m = 0..m_max via the forward
// recursions; extends m_max until the tail mass drops below 1e-6.
struct SteadyTable {
    std::vector<double> pi_g, pi_b;
};
SteadyTable steady_recursion(const TDQueueParams& p, double z0, int m_max);

double mean_queue(const TDQueueParams& p, double z0);
double waiting_time(const TDQueueParams& p, double z0); // Q / lambda

// P(transmission attempt) = sum_state (G_state(1) - pi^state_0)(1 - e^-mu_state)
// with the raw rates in the exponentials.
double attempt_prob(const TDQueueParams& p, double z0);

// Partial generating functions (G_g(z), G_b(z)).
std::pair<double, double> partial_gf(const TDQueueParams& p, double z0, double z);

struct Steady {
    double z0;
    double pi_g0, pi_b0;
    double p_succ;
    double attempt;
    double mean_queue;
    double wait;
    int iterations;
};

// Coupled solve of p_succ = (1 - P_t)^(K-1) with the cubic root.
Steady solve_model3(double K, double lambda, double mu_g, double mu_b, double alpha,
                    double beta, double tol = 1e-10, int max_iter = 10000);

} // namespace gesched::qmodel3

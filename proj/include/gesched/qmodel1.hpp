#pragma once

#include <cstdint>
#include <vector>

#include "gesched/rng.hpp"

namespace gesched::qmodel1 {

// Coupled-chain approximation of K interacting queues under delayed first
// transmission: a system-status chain over {Idle, Active, Blocked}^K (at
// most one Active) and a per-user queue-length chain, solved together by
// fixed-point iteration.

inline constexpr int kMaxUsers = 10; // 2^9 * 12 = 6144 status states

enum Status : uint8_t { Idle = 0, Active = 1, Blocked = 2 };

using StatusVector = std::vector<uint8_t>;

struct UserParams {
    double lambda; // per-slot arrival probability
    double p;      // per-slot transmission-attempt probability
};

struct AuxProbs {
    std::vector<double> p11; // P_i(1|1) = P(queue > 1 | user i active)
    std::vector<double> p02; // P_i(0|2) = P(queue = 1 | user i blocked)
};

struct SuccessProbs {
    std::vector<double> P_I, P_A, P_B;
};

struct QueueSteady {
    double pi00; // blocked, no packets beyond the head-of-line one
    double pi10; // unblocked, empty (idle)
    double pi11; // unblocked, one packet
    double G0_1; // P(blocked)
    double G1_1; // P(unblocked)
};

// All status vectors with at most one Active user; count 2^(K-1) (K+2).
std::vector<StatusVector> enumerate_states(int K);

// One-slot transition probability of the status chain, Appendix-style case
// analysis collapsed to the generative slot semantics: per user an attempt
// lottery (idle: lambda*p, otherwise p), success iff exactly one attempts,
// post-success emptiness decided by the aux probabilities.
double status_transition_prob(const StatusVector& from, const StatusVector& to,
                              const std::vector<UserParams>& params, const AuxProbs& aux);

// Event-level sampler of the same slot; the Monte Carlo oracle for the
// closed form above.
StatusVector sample_status_transition(const StatusVector& from,
                                      const std::vector<UserParams>& params,
                                      const AuxProbs& aux, rng::Stream& rng);

struct StatusDistribution {
    std::vector<StatusVector> states;
    std::vector<double> prob;
};

StatusDistribution status_stationary(const std::vector<UserParams>& params,
                                     const AuxProbs& aux);

SuccessProbs success_probs(const StatusDistribution& st,
                           const std::vector<UserParams>& params);

// Closed-form steady state of one user's queue-length chain.
QueueSteady queue_steady(double P_I, double P_A, double P_B, double lambda);

AuxProbs aux_update(const std::vector<QueueSteady>& qs,
                    const std::vector<UserParams>& params);

struct Solution {
    SuccessProbs sp;
    std::vector<QueueSteady> queues;
    StatusDistribution status;
    AuxProbs aux;
    int iterations = 0;
    double residual = 0.0;
};

// Wegstein-accelerated alternation between the two chains. tol applies to
// the max-norm change of the aux-probability vector.
Solution solve_model1(const std::vector<UserParams>& params, double tol = 1e-8,
                      int max_iter = 500);

struct Metrics {
    double L;      // mean queue size, blocked head-of-line packet excluded
    double W_q;    // time in line (Little)
    double W_s;    // service time
    double D;      // delay W_q + W_s + 1
    double p_succ; // success probability given exceedance with nonempty queue
    bool applicable; // false when lambda_i = 0
};

struct SystemMetrics {
    std::vector<Metrics> per_user;
    double weighted_delay; // sum D_i lambda_i / sum lambda_i
};

SystemMetrics metrics_model1(const Solution& sol, const std::vector<UserParams>& params);

} // namespace gesched::qmodel1

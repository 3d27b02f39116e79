#pragma once

#include "gesched/channel.hpp"
#include "gesched/evt.hpp"

namespace gesched::dsched {

enum class ThresholdMethod { AsymptoticMixture, ExactMixture, RefinedGaussian };

struct ThresholdPlan {
    double u;           // capacity threshold
    double K;           // population size
    double exceed_prob; // target per-user exceedance probability
    ThresholdMethod method;
};

const char* method_name(ThresholdMethod m);

// u = b_K, the asymptotic solution of 1 - H(u) = 1/K.
ThresholdPlan threshold_asymptotic(double K, const channel::ChannelModel& m);

// Exact numerical solution of 1 - H(u) = 1/K.
ThresholdPlan threshold_exact(double K, const channel::ChannelModel& m);

// Gaussian-only refinement u1 = mu + sqrt(2) sigma erfc^-1(2/K).
ThresholdPlan threshold_refined_gaussian(double K, double mu, double sigma);

// P(exactly one of K users exceeds a 1/K threshold) = K (1/K) (1-1/K)^(K-1).
double utilization_prob(double K);

struct DistributedCapacity {
    double value;            // e^-1 (u + 1/a_K)
    double conditional_mean; // u + 1/a_K, mean capacity given exceedance
    double threshold;        // u = b_K
    double utilization_asymptotic; // e^-1 (used in `value`)
    double utilization_finite_k;   // K (1/K)(1-1/K)^(K-1)
};

// Expected capacity under the distributed threshold algorithm.
DistributedCapacity expected_capacity_distributed(double K, const channel::ChannelModel& m);

// Level u_n(tau) = log(1/tau)/a_n + b_n for the Gaussian exceedance point
// process to have intensity tau on the scaled unit interval.
double level_for_rate(double tau, double n, double mu, double sigma);

} // namespace gesched::dsched

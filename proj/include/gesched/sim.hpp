#pragma once

#include <cstdint>
#include <vector>

#include "gesched/channel.hpp"
#include "gesched/rng.hpp"

namespace gesched::sim {

enum class ArrivalKind { BernoulliPerSlot, PoissonRate };
enum class CapacityMode { ChainDependent, IIDMixture, IIDGaussian };

// Slotted Monte Carlo of K users sharing the channel. Transmission happens
// when a user's capacity exceeds the threshold (or with an explicit attempt
// probability) and its queue is nonempty; exactly one transmitter in a slot
// means success and the head-of-line packet departs at slot end.
struct SimConfig {
    int K = 1;
    channel::ChannelModel model{0.1, 0.1, 1.0, 0.5, 0.0, 0.3};
    bool use_capacity = false; // false: direct attempt probability below
    double threshold_u = 0.0;
    double attempt_prob = 0.0;
    // state-dependent access (good/bad attempt probabilities; channel states
    // follow model.alpha/beta); used for the Markov-modulated queue runs
    bool state_dependent_attempt = false;
    double attempt_prob_bad = 0.0;
    ArrivalKind arrivals = ArrivalKind::BernoulliPerSlot;
    double lambda_per_user = 0.0;
    int64_t horizon = 100000;
    int64_t warmup = -1; // < 0: 20% of horizon
    int replications = 1;
    uint64_t seed = 1;
    CapacityMode capacity_mode = CapacityMode::ChainDependent;
    bool backlogged = false;
    bool collisions = true; // false: vanishing-transmission-time scenario
};

struct Estimate {
    double mean = 0.0;
    double half_width = 0.0; // 95% normal CI from across-replication variance
    int replications = 0;
};

struct SimResult {
    Estimate mean_queue;      // excluding a blocked head-of-line packet
    Estimate mean_queue_incl; // including it
    Estimate time_in_line;    // arrival -> head of line
    Estimate service_time;    // head of line -> success, transmission slot excluded
    Estimate delay;           // arrival -> departure, transmission slot included
    Estimate success_prob;    // successes / attempts
    Estimate p_coll;          // 1 - success_prob
    Estimate throughput;      // departures per slot per user
    Estimate empty_frac;      // slots with an empty queue at slot start
    // exact flow conservation over the full run, warmup included
    uint64_t total_arrivals = 0;
    uint64_t total_departures = 0;
    uint64_t final_backlog = 0;
};

SimResult run_slotted(const SimConfig& cfg);

// Per-slot maximum capacity over the K users; returns all samples plus the
// across-replication mean estimate.
struct MaxCapacityResult {
    std::vector<double> samples;
    Estimate mean;
};
MaxCapacityResult estimate_capacity_max(const SimConfig& cfg);

// Exceedance counts of one user's capacity sequence per window of
// `window` draws; histogram over count values.
struct ExceedanceResult {
    std::vector<uint64_t> histogram; // histogram[k] = windows with k exceedances
    uint64_t windows = 0;
    std::vector<int64_t> first_window_events; // event positions of window 0
};
ExceedanceResult exceedance_counts(const SimConfig& cfg, double level, int window,
                                   int n_windows);

// Independent Bernoulli thinning of an event list.
std::vector<int64_t> thin_events(const std::vector<int64_t>& events, double retain_prob,
                                 rng::Stream& rng);

} // namespace gesched::sim

#include "gesched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/kernels.hpp"

namespace gesched::sim {

namespace {

// counter purposes; (key, slot, purpose, user) addresses every draw
enum Purpose : uint32_t {
    P_ARRIVAL = 0,
    P_CAPACITY = 1,
    P_STATE = 2,
    P_INIT = 3,
    P_EXTRA = 4, // second arrival word for Poisson counts
};

int poisson_inv(double u, double mean) {
    // inversion from a single uniform; mean is small in every use here
    double p = std::exp(-mean), cdf = p;
    int k = 0;
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / k;
        cdf += p;
    }
    return k;
}

Estimate combine(const std::vector<double>& per_rep) {
    Estimate e;
    e.replications = int(per_rep.size());
    if (per_rep.empty()) return e;
    double s = 0.0;
    for (const double v : per_rep) s += v;
    e.mean = s / double(per_rep.size());
    if (per_rep.size() > 1) {
        double ss = 0.0;
        for (const double v : per_rep) ss += (v - e.mean) * (v - e.mean);
        const double sd = std::sqrt(ss / double(per_rep.size() - 1));
        e.half_width = 1.959963984540054 * sd / std::sqrt(double(per_rep.size()));
    }
    return e;
}

struct RepTotals {
    double q_excl = 0.0, q_incl = 0.0, empty = 0.0;
    double til = 0.0, svc = 0.0, dly = 0.0;
    uint64_t departures = 0, attempts = 0, successes = 0;
    uint64_t sampled_user_slots = 0, measured_slots = 0;
};

void init_states(std::vector<uint8_t>& st, const SimConfig& cfg, rng::Key key) {
    const int K = cfg.K;
    st.assign(K, 0);
    if (!cfg.use_capacity && !cfg.state_dependent_attempt) return;
    if (cfg.use_capacity && cfg.capacity_mode == CapacityMode::IIDGaussian) return;
    const auto [p, q] = channel::stationary_state_probs(cfg.model);
    (void)q;
    std::vector<double> u(K);
    kern::ops().uniforms(key, 0, P_INIT, K, u.data());
    for (int i = 0; i < K; ++i) st[i] = u[i] < p ? 0 : 1;
}

// exceedance decisions for one slot, written into `exceed`
void slot_exceed(const SimConfig& cfg, rng::Key key, uint32_t slot, std::vector<uint8_t>& st,
                 std::vector<double>& ubuf, std::vector<double>& cbuf,
                 std::vector<char>& exceed) {
    const int K = cfg.K;
    const auto& ops = kern::ops();
    ops.uniforms(key, slot, P_CAPACITY, K, ubuf.data());
    if (!cfg.use_capacity) {
        if (cfg.state_dependent_attempt) {
            if (slot > 0) {
                std::vector<double> su(K);
                ops.uniforms(key, slot, P_STATE, K, su.data());
                ops.step_states(su.data(), st.data(), cfg.model.alpha, cfg.model.beta, K);
            }
            for (int i = 0; i < K; ++i)
                exceed[i] = ubuf[i] < (st[i] == 0 ? cfg.attempt_prob : cfg.attempt_prob_bad);
            return;
        }
        for (int i = 0; i < K; ++i) exceed[i] = ubuf[i] < cfg.attempt_prob;
        return;
    }
    const auto& m = cfg.model;
    switch (cfg.capacity_mode) {
        case CapacityMode::ChainDependent:
            if (slot > 0) {
                std::vector<double> su(K);
                ops.uniforms(key, slot, P_STATE, K, su.data());
                ops.step_states(su.data(), st.data(), m.alpha, m.beta, K);
            }
            break;
        case CapacityMode::IIDMixture: {
            const auto [p, q] = channel::stationary_state_probs(m);
            (void)q;
            std::vector<double> su(K);
            ops.uniforms(key, slot, P_STATE, K, su.data());
            for (int i = 0; i < K; ++i) st[i] = su[i] < p ? 0 : 1;
            break;
        }
        case CapacityMode::IIDGaussian:
            std::fill(st.begin(), st.end(), uint8_t(0));
            break;
    }
    ops.gaussians(ubuf.data(), st.data(), m.mu_g, m.sigma_g, m.mu_b, m.sigma_b, cbuf.data(), K);
    for (int i = 0; i < K; ++i) exceed[i] = cbuf[i] > cfg.threshold_u;
}

} // namespace

SimResult run_slotted(const SimConfig& cfg) {
    if (cfg.K < 1) throw std::invalid_argument("run_slotted: K must be >= 1");
    if (cfg.replications < 1) throw std::invalid_argument("run_slotted: replications >= 1");
    const int64_t warmup = cfg.warmup >= 0 ? cfg.warmup : cfg.horizon / 5;
    if (warmup >= cfg.horizon) throw std::invalid_argument("run_slotted: warmup >= horizon");
    if (cfg.use_capacity || cfg.state_dependent_attempt) cfg.model.validate();

    const int K = cfg.K;
    std::vector<double> r_qexcl, r_qincl, r_empty, r_til, r_svc, r_dly, r_succ, r_tput;
    uint64_t tot_arr = 0, tot_dep = 0, tot_backlog = 0;

    for (int rep = 0; rep < cfg.replications; ++rep) {
        const rng::Key key = rng::make_key(cfg.seed, uint32_t(rep));
        std::vector<uint8_t> st;
        init_states(st, cfg, key);

        std::vector<std::deque<int64_t>> q(K); // arrival slot per queued packet
        std::vector<int64_t> hol_since(K, 0);
        std::vector<uint8_t> blocked(K, 0); // nonempty queue whose last attempt failed
        std::vector<double> ubuf(K), cbuf(K), abuf(K);
        std::vector<char> exceed(K), attempt(K);

        RepTotals tt;
        uint64_t rep_arr = 0, rep_dep = 0;

        for (int64_t t = 0; t < cfg.horizon; ++t) {
            const bool measured = t >= warmup;
            if (measured && !cfg.backlogged) {
                for (int i = 0; i < K; ++i) {
                    const auto len = double(q[i].size());
                    tt.q_incl += len;
                    tt.q_excl += blocked[i] ? len - 1.0 : len;
                    tt.empty += q[i].empty() ? 1.0 : 0.0;
                }
                tt.sampled_user_slots += uint64_t(K);
            }
            if (measured) ++tt.measured_slots;

            // arrivals at slot start
            if (!cfg.backlogged && cfg.lambda_per_user > 0.0) {
                kern::ops().uniforms(key, uint32_t(t), P_ARRIVAL, K, abuf.data());
                for (int i = 0; i < K; ++i) {
                    int n_new = 0;
                    if (cfg.arrivals == ArrivalKind::BernoulliPerSlot)
                        n_new = abuf[i] < cfg.lambda_per_user ? 1 : 0;
                    else
                        n_new = poisson_inv(abuf[i], cfg.lambda_per_user);
                    for (int a = 0; a < n_new; ++a) {
                        if (q[i].empty()) hol_since[i] = t;
                        q[i].push_back(t);
                        ++rep_arr;
                    }
                }
            }

            slot_exceed(cfg, key, uint32_t(t), st, ubuf, cbuf, exceed);

            int n_att = 0;
            for (int i = 0; i < K; ++i) {
                attempt[i] = exceed[i] && (cfg.backlogged || !q[i].empty());
                n_att += attempt[i];
            }
            const bool lone = n_att == 1;

            for (int i = 0; i < K; ++i) {
                if (!attempt[i]) {
                    if (!cfg.backlogged) blocked[i] = !q[i].empty();
                    continue;
                }
                if (measured) ++tt.attempts;
                const bool win = cfg.collisions ? lone : true;
                if (!win) {
                    blocked[i] = 1;
                    continue;
                }
                if (measured) ++tt.successes;
                if (cfg.backlogged) {
                    if (measured) {
                        tt.svc += double(t - hol_since[i]);
                        ++tt.departures;
                    }
                    hol_since[i] = t + 1;
                    continue;
                }
                const int64_t arrived = q[i].front();
                q[i].pop_front();
                ++rep_dep;
                if (measured) {
                    tt.til += double(hol_since[i] - arrived);
                    tt.svc += double(t - hol_since[i]);
                    tt.dly += double(t - arrived + 1);
                    ++tt.departures;
                }
                if (!q[i].empty()) hol_since[i] = t + 1;
                blocked[i] = 0; // success: active or idle, not blocked
            }
        }

        tot_arr += rep_arr;
        tot_dep += rep_dep;
        for (int i = 0; i < K; ++i) tot_backlog += q[i].size();

        const double us = double(std::max<uint64_t>(tt.sampled_user_slots, 1));
        const double dep = double(std::max<uint64_t>(tt.departures, 1));
        r_qexcl.push_back(tt.q_excl / us);
        r_qincl.push_back(tt.q_incl / us);
        r_empty.push_back(tt.empty / us);
        r_til.push_back(tt.til / dep);
        r_svc.push_back(tt.svc / dep);
        r_dly.push_back(tt.dly / dep);
        r_succ.push_back(tt.attempts > 0 ? double(tt.successes) / double(tt.attempts) : 0.0);
        r_tput.push_back(double(tt.departures) /
                         (double(std::max<int64_t>(tt.measured_slots, 1)) * K));
    }

    SimResult out;
    out.mean_queue = combine(r_qexcl);
    out.mean_queue_incl = combine(r_qincl);
    out.empty_frac = combine(r_empty);
    out.time_in_line = combine(r_til);
    out.service_time = combine(r_svc);
    out.delay = combine(r_dly);
    out.success_prob = combine(r_succ);
    std::vector<double> pc(r_succ.size());
    for (std::size_t i = 0; i < r_succ.size(); ++i) pc[i] = 1.0 - r_succ[i];
    out.p_coll = combine(pc);
    out.throughput = combine(r_tput);
    out.total_arrivals = tot_arr;
    out.total_departures = tot_dep;
    out.final_backlog = tot_backlog;
    return out;
}

MaxCapacityResult estimate_capacity_max(const SimConfig& cfg) {
    if (cfg.K < 1) throw std::invalid_argument("estimate_capacity_max: K must be >= 1");
    cfg.model.validate();
    const int K = cfg.K;
    MaxCapacityResult out;
    out.samples.reserve(std::size_t(cfg.horizon) * std::size_t(cfg.replications));
    std::vector<double> rep_means;
    std::vector<double> ubuf(K), cbuf(K);
    std::vector<char> ex(K);
    SimConfig c = cfg;
    c.use_capacity = true;
    c.threshold_u = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < cfg.replications; ++rep) {
        const rng::Key key = rng::make_key(cfg.seed, uint32_t(rep));
        std::vector<uint8_t> st;
        init_states(st, c, key);
        double acc = 0.0;
        for (int64_t t = 0; t < cfg.horizon; ++t) {
            slot_exceed(c, key, uint32_t(t), st, ubuf, cbuf, ex);
            double mx = cbuf[0];
            for (int i = 1; i < K; ++i) mx = std::max(mx, cbuf[i]);
            out.samples.push_back(mx);
            acc += mx;
        }
        rep_means.push_back(acc / double(cfg.horizon));
    }
    out.mean = combine(rep_means);
    return out;
}

ExceedanceResult exceedance_counts(const SimConfig& cfg, double level, int window,
                                   int n_windows) {
    if (window < 1 || n_windows < 1)
        throw std::invalid_argument("exceedance_counts: window and n_windows must be >= 1");
    cfg.model.validate();
    ExceedanceResult out;
    out.windows = uint64_t(n_windows);
    const rng::Key key = rng::make_key(cfg.seed, 0);
    const auto [p, qprob] = channel::stationary_state_probs(cfg.model);
    (void)qprob;
    std::vector<double> u(window), su(window), cap(window);
    std::vector<uint8_t> st(window);
    uint8_t carry_state = 0;
    {
        carry_state = rng::uniform_at(key, 0, P_INIT, 0) < p ? 0 : 1;
    }
    const auto& m = cfg.model;
    for (int w = 0; w < n_windows; ++w) {
        kern::ops().uniforms(key, uint32_t(w), P_CAPACITY, window, u.data());
        switch (cfg.capacity_mode) {
            case CapacityMode::ChainDependent: {
                kern::ops().uniforms(key, uint32_t(w), P_STATE, window, su.data());
                // serial state evolution across the window
                uint8_t s = carry_state;
                for (int i = 0; i < window; ++i) {
                    if (s == 0)
                        s = su[i] < m.alpha ? 1 : 0;
                    else
                        s = su[i] < m.beta ? 0 : 1;
                    st[i] = s;
                }
                carry_state = st[window - 1];
                break;
            }
            case CapacityMode::IIDMixture: {
                kern::ops().uniforms(key, uint32_t(w), P_STATE, window, su.data());
                for (int i = 0; i < window; ++i) st[i] = su[i] < p ? 0 : 1;
                break;
            }
            case CapacityMode::IIDGaussian:
                std::fill(st.begin(), st.end(), uint8_t(0));
                break;
        }
        kern::ops().gaussians(u.data(), st.data(), m.mu_g, m.sigma_g, m.mu_b, m.sigma_b,
                              cap.data(), window);
        unsigned count = 0;
        for (int i = 0; i < window; ++i) {
            if (cap[i] > level) {
                ++count;
                if (w == 0) out.first_window_events.push_back(i);
            }
        }
        if (count >= out.histogram.size()) out.histogram.resize(count + 1, 0);
        ++out.histogram[count];
    }
    return out;
}

std::vector<int64_t> thin_events(const std::vector<int64_t>& events, double retain_prob,
                                 rng::Stream& rng) {
    if (!(retain_prob >= 0.0 && retain_prob <= 1.0))
        throw std::invalid_argument("thin_events: retain_prob outside [0, 1]");
    std::vector<int64_t> kept;
    kept.reserve(events.size());
    for (const int64_t e : events)
        if (rng.next_u01() < retain_prob) kept.push_back(e);
    return kept;
}

} // namespace gesched::sim

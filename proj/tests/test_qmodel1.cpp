#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "gesched/errors.hpp"
#include "gesched/qmodel1.hpp"
#include "gesched/rng.hpp"

using namespace gesched;
using namespace gesched::qmodel1;

namespace {

std::vector<UserParams> symmetric(int K, double lambda_total, double p) {
    return std::vector<UserParams>(std::size_t(K), UserParams{lambda_total / K, p});
}

AuxProbs const_aux(int K, double p11, double p02) {
    return AuxProbs{std::vector<double>(std::size_t(K), p11),
                    std::vector<double>(std::size_t(K), p02)};
}

uint32_t enc(const StatusVector& s) {
    uint32_t v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) v |= uint32_t(s[i]) << (2 * i);
    return v;
}

} // namespace

TEST_CASE("status space size is 2^(K-1)(K+2)") {
    CHECK(enumerate_states(1).size() == 3);
    CHECK(enumerate_states(2).size() == 8);
    CHECK(enumerate_states(3).size() == 20);
    CHECK(enumerate_states(7).size() == 576);
    CHECK_THROWS(enumerate_states(11));
}

TEST_CASE("every status-chain row sums to one (exhaustive K<=3, sampled K=4..7)") {
    rng::Stream rs(3);
    for (int K = 1; K <= 7; ++K) {
        std::vector<UserParams> params;
        for (int i = 0; i < K; ++i) params.push_back({0.02 + 0.05 * rs.next_u01(), 0.2 + 0.5 * rs.next_u01()});
        AuxProbs aux{std::vector<double>(K), std::vector<double>(K)};
        for (int i = 0; i < K; ++i) {
            aux.p11[i] = rs.next_u01();
            aux.p02[i] = rs.next_u01();
        }
        const auto states = enumerate_states(K);
        const bool exhaustive = K <= 3;
        const std::size_t step = exhaustive ? 1 : std::max<std::size_t>(states.size() / 5, 1);
        for (std::size_t s = 0; s < states.size(); s += step) {
            double sum = 0.0;
            for (const auto& to : states) sum += status_transition_prob(states[s], to, params, aux);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("K=1 idle row matches the hand expansion") {
    const std::vector<UserParams> params{{0.3, 0.4}};
    const auto aux = const_aux(1, 0.25, 0.7);
    const StatusVector idle{Idle}, blocked{Blocked}, active{Active};
    // no arrival, or arrival+exceed+lone success (queue drains)
    CHECK(status_transition_prob(idle, idle, params, aux) ==
          doctest::Approx(0.7 + 0.3 * 0.4).epsilon(1e-15));
    // arrival held back by the threshold
    CHECK(status_transition_prob(idle, blocked, params, aux) ==
          doctest::Approx(0.3 * 0.6).epsilon(1e-15));
    CHECK(status_transition_prob(idle, active, params, aux) == 0.0);
    // blocked user: lone win splits by queue tail and arrival
    CHECK(status_transition_prob(blocked, active, params, aux) ==
          doctest::Approx(0.4 * (1.0 - 0.7 * 0.7)).epsilon(1e-15));
    CHECK(status_transition_prob(blocked, idle, params, aux) ==
          doctest::Approx(0.4 * 0.7 * 0.7).epsilon(1e-15));
    CHECK(status_transition_prob(blocked, blocked, params, aux) ==
          doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("transition probabilities match the event-level slot oracle") {
    rng::Stream rs(12);
    const std::vector<UserParams> params{{0.08, 0.5}, {0.15, 0.35}};
    const auto aux = const_aux(2, 0.3, 0.6);
    const auto states = enumerate_states(2);
    for (const auto& from : states) {
        std::map<uint32_t, int> freq;
        const int trials = 200000;
        for (int t = 0; t < trials; ++t) ++freq[enc(sample_status_transition(from, params, aux, rs))];
        for (const auto& to : states) {
            const double p = status_transition_prob(from, to, params, aux);
            const double emp = freq.count(enc(to)) ? double(freq.at(enc(to))) / trials : 0.0;
            const double sd = std::sqrt(std::max(p * (1.0 - p) / trials, 1e-12));
            INFO("from " << enc(from) << " to " << enc(to));
            CHECK(std::fabs(emp - p) < std::max(3.0 * sd, 5e-5));
        }
    }
}

TEST_CASE("status stationary distribution") {
    // K=1, lambda=0: all mass on Idle
    {
        const std::vector<UserParams> params{{0.0, 0.5}};
        const auto st = status_stationary(params, const_aux(1, 0.0, 1.0));
        for (std::size_t s = 0; s < st.states.size(); ++s) {
            if (st.states[s][0] == Idle)
                CHECK(st.prob[s] == doctest::Approx(1.0).epsilon(1e-10));
            else
                CHECK(st.prob[s] == doctest::Approx(0.0).epsilon(1e-10));
        }
    }
    // K=2 symmetric: swap invariance
    {
        const auto params = symmetric(2, 0.1, 0.5);
        const auto st = status_stationary(params, const_aux(2, 0.2, 0.8));
        std::map<uint32_t, double> pr;
        for (std::size_t s = 0; s < st.states.size(); ++s) pr[enc(st.states[s])] = st.prob[s];
        for (const auto& sv : st.states) {
            StatusVector sw{sv[1], sv[0]};
            CHECK(pr.at(enc(sv)) == doctest::Approx(pr.at(enc(sw))).epsilon(1e-8));
        }
    }
    // K=2: matches long-run slot-oracle occupancy
    {
        const std::vector<UserParams> params{{0.05, 0.5}, {0.05, 0.5}};
        const auto aux = const_aux(2, 0.3, 0.7);
        const auto st = status_stationary(params, aux);
        rng::Stream rs(44);
        StatusVector s{Idle, Idle};
        std::map<uint32_t, int> freq;
        const int steps = 400000;
        for (int t = 0; t < steps; ++t) {
            s = sample_status_transition(s, params, aux, rs);
            ++freq[enc(s)];
        }
        for (std::size_t i = 0; i < st.states.size(); ++i) {
            const double emp = freq.count(enc(st.states[i])) ? double(freq.at(enc(st.states[i]))) / steps : 0.0;
            // dependent samples: allow a generous band
            CHECK(std::fabs(emp - st.prob[i]) < 0.01);
        }
    }
}

TEST_CASE("success probabilities") {
    // K=1: a blocked user succeeds whenever it exceeds
    {
        const std::vector<UserParams> params{{0.2, 0.45}};
        const auto st = status_stationary(params, const_aux(1, 0.3, 0.7));
        const auto sp = success_probs(st, params);
        CHECK(sp.P_B[0] == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(sp.P_A[0] == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(sp.P_I[0] == doctest::Approx(0.2 * 0.45).epsilon(1e-12));
    }
    // symmetric users get identical probabilities
    {
        const auto params = symmetric(3, 0.15, 1.0 / 3.0);
        const auto st = status_stationary(params, const_aux(3, 0.2, 0.8));
        const auto sp = success_probs(st, params);
        CHECK(sp.P_B[0] == doctest::Approx(sp.P_B[2]).epsilon(1e-9));
        CHECK(sp.P_A[0] == doctest::Approx(sp.P_A[1]).epsilon(1e-9));
        CHECK(sp.P_I[1] == doctest::Approx(sp.P_I[2]).epsilon(1e-9));
    }
    // K=2: conditional empirical success frequencies from the slot oracle
    {
        const std::vector<UserParams> params{{0.05, 0.5}, {0.05, 0.5}};
        const auto aux = const_aux(2, 0.3, 0.7);
        const auto st = status_stationary(params, aux);
        const auto sp = success_probs(st, params);
        rng::Stream rs(45);
        StatusVector s{Idle, Idle};
        long n_by_status[3] = {0, 0, 0}, win_by_status[3] = {0, 0, 0};
        const int steps = 600000;
        for (int t = 0; t < steps; ++t) {
            // replay user 0's slot by hand to observe its success event
            const auto from = s;
            bool att0 = false, any1 = false;
            if (from[0] == Idle)
                att0 = rs.next_u01() < params[0].lambda && rs.next_u01() < params[0].p;
            else
                att0 = rs.next_u01() < params[0].p;
            if (from[1] == Idle)
                any1 = rs.next_u01() < params[1].lambda && rs.next_u01() < params[1].p;
            else
                any1 = rs.next_u01() < params[1].p;
            const bool win0 = att0 && !any1;
            ++n_by_status[from[0]];
            win_by_status[from[0]] += win0;
            // advance the chain: statuses follow from the same events
            StatusVector to(2);
            auto next = [&](int i, bool att, bool win) -> uint8_t {
                if (att && win) {
                    const auto lo_p11 = aux.p11[i];
                    const auto lo_p02 = aux.p02[i];
                    double win_idle;
                    if (from[i] == Idle) win_idle = 1.0;
                    else if (from[i] == Blocked) win_idle = (1 - params[i].lambda) * lo_p02;
                    else win_idle = (1 - params[i].lambda) * (1 - lo_p11);
                    return rs.next_u01() < win_idle ? Idle : Active;
                }
                if (att) return Blocked;
                if (from[i] == Idle) {
                    // silent: split no-arrival vs arrival-no-exceed
                    const double sil = (1 - params[i].lambda) + params[i].lambda * (1 - params[i].p);
                    return rs.next_u01() < (1 - params[i].lambda) / sil ? Idle : Blocked;
                }
                return Blocked;
            };
            const bool win1 = any1 && !att0;
            to[0] = next(0, att0, win0);
            to[1] = next(1, any1, win1);
            s = to;
        }
        const double att_f[3] = {params[0].lambda * params[0].p, params[0].p, params[0].p};
        const double model[3] = {sp.P_I[0], sp.P_A[0], sp.P_B[0]};
        for (int x = 0; x < 3; ++x) {
            if (n_by_status[x] < 2000) continue;
            const double emp = att_f[x] > 0 ? double(win_by_status[x]) / double(n_by_status[x]) : 0;
            const double sd = std::sqrt(model[x] * (1 - model[x]) / double(n_by_status[x]));
            CHECK(std::fabs(emp - model[x]) < std::max(3.0 * sd, 3e-3));
        }
    }
}

TEST_CASE("queue steady closed forms") {
    // lambda -> 0
    const auto q0 = queue_steady(0.1, 0.5, 0.5, 1e-12);
    CHECK(q0.pi10 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q0.pi00 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(q0.G0_1 == doctest::Approx(0.0).epsilon(1e-9));
    // total probability split over blocked/unblocked
    rng::Stream rs(6);
    for (int rep = 0; rep < 40; ++rep) {
        const double P_B = 0.3 + 0.6 * rs.next_u01();
        const double P_A = 0.3 + 0.6 * rs.next_u01();
        const double P_I = rs.next_u01() * P_A;
        const double lam = 0.2 * rs.next_u01();
        if (!((1 - lam) * P_B - lam * (P_I - P_A) > 0)) continue;
        if ((1 - lam) * P_B - lam * (1 - P_A) < 0) continue;
        const auto q = queue_steady(P_I, P_A, P_B, lam);
        CHECK(q.G0_1 + q.G1_1 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(q.pi10 >= 0.0);
        CHECK(q.pi10 <= 1.0);
    }
    CHECK_THROWS_AS(queue_steady(0.9, 0.1, 0.05, 0.5), model_error);
}

TEST_CASE("aux boundary identities") {
    // pi(1,1) = G1(1) - pi(1,0)  =>  P(1|1) = 0
    std::vector<QueueSteady> qs{{0.1, 0.4, 0.2, 0.3, 0.7}};
    qs[0].pi11 = qs[0].G1_1 - qs[0].pi10; // 0.3
    auto aux = aux_update(qs, {{0.1, 0.5}});
    CHECK(aux.p11[0] == doctest::Approx(0.0).epsilon(1e-12));
    // pi(0,0) = G0(1)  =>  P(0|2) = 1
    qs[0].pi00 = qs[0].G0_1;
    aux = aux_update(qs, {{0.1, 0.5}});
    CHECK(aux.p02[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solver: trivial, converged, fixed point reproduces itself") {
    // lambda = 0 short-circuits
    const auto params0 = symmetric(2, 0.0, 0.5);
    const auto sol0 = solve_model1(params0);
    CHECK(sol0.iterations <= 2);
    CHECK(sol0.queues[0].pi10 == 1.0);

    const auto params = symmetric(2, 0.15, 0.5);
    const auto sol = solve_model1(params);
    CHECK(sol.residual < 1e-8);
    // one more sweep through the public map changes nothing beyond tol
    const auto st = status_stationary(params, sol.aux);
    const auto sp = success_probs(st, params);
    std::vector<QueueSteady> qs;
    for (int i = 0; i < 2; ++i)
        qs.push_back(queue_steady(sp.P_I[i], sp.P_A[i], sp.P_B[i], params[i].lambda));
    const auto aux2 = aux_update(qs, params);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::fabs(aux2.p11[i] - sol.aux.p11[i]) < 1e-7);
        CHECK(std::fabs(aux2.p02[i] - sol.aux.p02[i]) < 1e-7);
    }

    // flow balance: unconditioned success rate equals the arrival rate
    const auto& q = sol.queues[0];
    const double succ_rate = sol.sp.P_A[0] * (q.G1_1 - q.pi10) + sol.sp.P_I[0] * q.pi10 +
                             sol.sp.P_B[0] * q.G0_1;
    CHECK(succ_rate == doctest::Approx(params[0].lambda).epsilon(0.02));
}

TEST_CASE("metrics: symmetry and empty-system limits") {
    const auto params = symmetric(3, 0.12, 1.0 / 3.0);
    const auto sol = solve_model1(params);
    const auto met = metrics_model1(sol, params);
    CHECK(met.per_user[0].L == doctest::Approx(met.per_user[2].L).epsilon(1e-6));
    CHECK(met.per_user[0].W_s == doctest::Approx(met.per_user[1].W_s).epsilon(1e-6));
    CHECK(met.per_user[0].p_succ == doctest::Approx(met.per_user[2].p_succ).epsilon(1e-6));
    CHECK(met.weighted_delay == doctest::Approx(met.per_user[0].D).epsilon(1e-6));
    CHECK(met.per_user[0].p_succ <= 1.0);

    const auto tiny = solve_model1(symmetric(2, 2e-4, 0.5));
    const auto mt = metrics_model1(tiny, symmetric(2, 2e-4, 0.5));
    CHECK(mt.per_user[0].L < 1e-3);
    CHECK(mt.per_user[0].W_s < 0.01);
}

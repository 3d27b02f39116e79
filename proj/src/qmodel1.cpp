#include "gesched/qmodel1.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "gesched/errors.hpp"

namespace gesched::qmodel1 {

namespace {

// Per-user event lotteries of one slot. A user transmits ("attempts") with
// probability att; if it is the only transmitter the slot succeeds. Users
// that stay silent follow sil_*, a lone winner follows succ_*.
struct UserLottery {
    double att;        // P(transmit)
    double sil_idle;   // P(silent and next status Idle)
    double sil_block;  // P(silent and next status Blocked)
    double win_active; // P(next status Active | lone winner)
    double win_idle;   // P(next status Idle  | lone winner)
};

UserLottery lottery(uint8_t status, const UserParams& up, double p11, double p02) {
    const double lam = up.lambda, lbar = 1.0 - up.lambda;
    const double p = up.p, pbar = 1.0 - up.p;
    UserLottery lo{};
    switch (status) {
        case Idle:
            lo.att = lam * p;
            lo.sil_idle = lbar;        // no arrival
            lo.sil_block = lam * pbar; // arrival held back by the threshold
            lo.win_active = 0.0;       // the single fresh packet departs
            lo.win_idle = 1.0;
            break;
        case Blocked:
            lo.att = p;
            lo.sil_idle = 0.0;
            lo.sil_block = pbar;
            lo.win_idle = lbar * p02; // queue was 1 and nothing arrived
            lo.win_active = 1.0 - lo.win_idle;
            break;
        case Active:
            lo.att = p;
            lo.sil_idle = 0.0;
            lo.sil_block = pbar;
            lo.win_active = p11 + lam * (1.0 - p11);
            lo.win_idle = lbar * (1.0 - p11);
            break;
        default: throw std::invalid_argument("invalid status value");
    }
    return lo;
}

double sil_to(const UserLottery& lo, uint8_t to) {
    if (to == Idle) return lo.sil_idle;
    if (to == Blocked) return lo.sil_block;
    return 0.0;
}

int count_active(const StatusVector& s) {
    int n = 0;
    for (const auto v : s) n += (v == Active);
    return n;
}

uint32_t encode(const StatusVector& s) {
    uint32_t v = 0;
    for (std::size_t i = 0; i < s.size(); ++i) v |= uint32_t(s[i]) << (2 * i);
    return v;
}

void check_params(const std::vector<UserParams>& params) {
    if (params.empty() || int(params.size()) > kMaxUsers)
        throw std::invalid_argument(
            "qmodel1: K must be in [1, 10]; the status space grows as 2^(K-1)(K+2)");
    for (const auto& up : params) {
        if (!(up.lambda >= 0.0 && up.lambda < 1.0))
            throw std::invalid_argument("qmodel1: lambda must lie in [0, 1)");
        if (!(up.p > 0.0 && up.p < 1.0))
            throw std::invalid_argument("qmodel1: p must lie in (0, 1)");
    }
}

} // namespace

std::vector<StatusVector> enumerate_states(int K) {
    if (K < 1 || K > kMaxUsers)
        throw std::invalid_argument("enumerate_states: K must be in [1, 10]");
    std::vector<StatusVector> out;
    out.reserve((std::size_t(1) << (K - 1)) * (K + 2));
    // all {Idle, Blocked}^K vectors, then each with one position forced Active
    for (int active = -1; active < K; ++active) {
        for (uint32_t bits = 0; bits < (1u << (active < 0 ? K : K - 1)); ++bits) {
            StatusVector s(K);
            int b = 0;
            for (int i = 0; i < K; ++i) {
                if (i == active) {
                    s[i] = Active;
                } else {
                    s[i] = ((bits >> b) & 1u) ? Blocked : Idle;
                    ++b;
                }
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

double status_transition_prob(const StatusVector& from, const StatusVector& to,
                              const std::vector<UserParams>& params, const AuxProbs& aux) {
    const int K = int(from.size());
    if (int(to.size()) != K || int(params.size()) != K)
        throw std::invalid_argument("status_transition_prob: size mismatch");
    if (count_active(from) > 1 || count_active(to) > 1) return 0.0;

    std::vector<UserLottery> lo(K);
    for (int i = 0; i < K; ++i) lo[i] = lottery(from[i], params[i], aux.p11[i], aux.p02[i]);

    int active_to = -1;
    for (int i = 0; i < K; ++i)
        if (to[i] == Active) active_to = i;

    if (active_to >= 0) {
        // exactly the winner transmits and stays active; everyone else silent
        double prob = lo[active_to].att * lo[active_to].win_active;
        for (int i = 0; i < K && prob > 0.0; ++i) {
            if (i == active_to) continue;
            prob *= sil_to(lo[i], to[i]);
        }
        return prob;
    }

    // No active user afterwards: nobody transmitted, or a lone winner drained
    // its queue, or a collision pushed every transmitter to Blocked.
    std::vector<double> f(K), g(K), h(K);
    for (int i = 0; i < K; ++i) {
        f[i] = sil_to(lo[i], to[i]);
        g[i] = (to[i] == Blocked) ? lo[i].att : 0.0;
        h[i] = (to[i] == Idle) ? lo[i].att * lo[i].win_idle : 0.0;
    }
    double prod_f = 1.0, prod_fg = 1.0;
    for (int i = 0; i < K; ++i) {
        prod_f *= f[i];
        prod_fg *= f[i] + g[i];
    }
    double singles = 0.0; // sum_j (h_j - g_j) prod_{i != j} f_i
    for (int j = 0; j < K; ++j) {
        if (h[j] == g[j]) continue;
        double rest = 1.0;
        for (int i = 0; i < K; ++i)
            if (i != j) rest *= f[i];
        singles += (h[j] - g[j]) * rest;
    }
    return prod_fg + singles;
}

StatusVector sample_status_transition(const StatusVector& from,
                                      const std::vector<UserParams>& params,
                                      const AuxProbs& aux, rng::Stream& rng) {
    const int K = int(from.size());
    StatusVector to(K);
    std::vector<char> attempts(K, 0);
    int n_attempts = 0;
    for (int i = 0; i < K; ++i) {
        const auto& up = params[i];
        if (from[i] == Idle) {
            const bool arrival = rng.next_u01() < up.lambda;
            if (!arrival) {
                to[i] = Idle;
                continue;
            }
            if (rng.next_u01() < up.p) {
                attempts[i] = 1;
                ++n_attempts;
            } else {
                to[i] = Blocked;
            }
        } else {
            if (rng.next_u01() < up.p) {
                attempts[i] = 1;
                ++n_attempts;
            } else {
                to[i] = Blocked;
            }
        }
    }
    for (int i = 0; i < K; ++i) {
        if (!attempts[i]) continue;
        if (n_attempts != 1) {
            to[i] = Blocked; // collision
            continue;
        }
        const auto lo = lottery(from[i], params[i], aux.p11[i], aux.p02[i]);
        to[i] = (rng.next_u01() < lo.win_idle) ? Idle : Active;
    }
    return to;
}

namespace {

struct Chain {
    std::vector<StatusVector> states;
    std::unordered_map<uint32_t, int> index;
    // successor lists: for each from-state, (to_index, prob)
    std::vector<std::vector<std::pair<int, double>>> succ;
};

Chain build_chain(const std::vector<UserParams>& params, const AuxProbs& aux) {
    const int K = int(params.size());
    Chain ch;
    ch.states = enumerate_states(K);
    ch.index.reserve(ch.states.size() * 2);
    for (int s = 0; s < int(ch.states.size()); ++s) ch.index[encode(ch.states[s])] = s;
    ch.succ.resize(ch.states.size());

    for (int s = 0; s < int(ch.states.size()); ++s) {
        const auto& from = ch.states[s];
        std::vector<int> idles;
        std::vector<int> nonidle;
        for (int i = 0; i < K; ++i)
            (from[i] == Idle ? idles : nonidle).push_back(i);

        auto add = [&](StatusVector&& to) {
            const double p = status_transition_prob(from, to, params, aux);
            if (p > 0.0) ch.succ[s].emplace_back(ch.index.at(encode(to)), p);
        };

        const std::size_t nsub = std::size_t(1) << idles.size();
        for (std::size_t w = 0; w < nsub; ++w) {
            StatusVector base(K, Blocked);
            for (std::size_t a = 0; a < idles.size(); ++a)
                base[idles[a]] = ((w >> a) & 1u) ? Blocked : Idle;
            // all non-idle users land Blocked unless they are the lone winner
            add(StatusVector(base));
            for (const int j : nonidle) {
                StatusVector t = base;
                t[j] = Active;
                add(std::move(t));
                StatusVector t2 = base;
                t2[j] = Idle;
                add(std::move(t2));
            }
        }
    }
    return ch;
}

std::vector<double> power_iterate(const Chain& ch, std::vector<double> pi, double tol,
                                  int max_iter) {
    const int n = int(ch.states.size());
    std::vector<double> next(n);
    for (int it = 0; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < n; ++s) {
            const double ps = pi[s];
            if (ps == 0.0) continue;
            for (const auto& [t, p] : ch.succ[s]) next[t] += ps * p;
        }
        double sum = 0.0;
        for (const double v : next) sum += v;
        double diff = 0.0;
        for (int s = 0; s < n; ++s) {
            next[s] /= sum;
            diff += std::fabs(next[s] - pi[s]);
        }
        pi.swap(next);
        if (diff < tol) return pi;
    }
    throw model_error("status_stationary: power iteration did not converge");
}

StatusDistribution stationary_impl(const std::vector<UserParams>& params, const AuxProbs& aux,
                                   const std::vector<double>* warm) {
    const Chain ch = build_chain(params, aux);
    std::vector<double> pi;
    if (warm != nullptr && warm->size() == ch.states.size())
        pi = *warm;
    else
        pi.assign(ch.states.size(), 1.0 / double(ch.states.size()));
    pi = power_iterate(ch, std::move(pi), 1e-13, 200000);
    return {ch.states, std::move(pi)};
}

} // namespace

StatusDistribution status_stationary(const std::vector<UserParams>& params,
                                     const AuxProbs& aux) {
    check_params(params);
    return stationary_impl(params, aux, nullptr);
}

SuccessProbs success_probs(const StatusDistribution& st,
                           const std::vector<UserParams>& params) {
    const int K = int(params.size());
    SuccessProbs sp{std::vector<double>(K), std::vector<double>(K), std::vector<double>(K)};
    // silent probability of user j given its status, averaged below
    auto silent = [&](int j, uint8_t status) {
        return status == Idle ? 1.0 - params[j].lambda * params[j].p : 1.0 - params[j].p;
    };
    std::vector<std::array<double, 3>> num(K, {0.0, 0.0, 0.0});
    std::vector<std::array<double, 3>> den(K, {0.0, 0.0, 0.0});
    for (std::size_t s = 0; s < st.states.size(); ++s) {
        const double ps = st.prob[s];
        if (ps == 0.0) continue;
        const auto& sv = st.states[s];
        for (int i = 0; i < K; ++i) {
            double others = 1.0;
            for (int j = 0; j < K; ++j)
                if (j != i) others *= silent(j, sv[j]);
            num[i][sv[i]] += ps * others;
            den[i][sv[i]] += ps;
        }
    }
    static const char* names[3] = {"Idle", "Active", "Blocked"};
    for (int i = 0; i < K; ++i) {
        const double att[3] = {params[i].lambda * params[i].p, params[i].p, params[i].p};
        double out[3];
        for (int x = 0; x < 3; ++x) {
            if (den[i][x] <= 0.0) {
                // unreachable status: conditioning event has probability zero
                if (params[i].lambda == 0.0 && x != Idle) {
                    out[x] = att[x]; // light-traffic limit, unused by the queue of this user
                    continue;
                }
                throw model_error(std::string("success_probs: user status '") + names[x] +
                                  "' has zero stationary probability");
            }
            out[x] = att[x] * num[i][x] / den[i][x];
        }
        sp.P_I[i] = out[Idle];
        sp.P_A[i] = out[Active];
        sp.P_B[i] = out[Blocked];
    }
    return sp;
}

QueueSteady queue_steady(double P_I, double P_A, double P_B, double lambda) {
    const double lam = lambda, lbar = 1.0 - lambda;
    const double den = lbar * P_B - lam * (P_I - P_A);
    if (!(den > 0.0))
        throw model_error("queue_steady: unstable queue, (1-l)P_B - l(P_I - P_A) <= 0");
    const double num10 = lbar * P_B - lam * (1.0 - P_A);
    if (num10 < 0.0)
        throw model_error("queue_steady: unstable queue, (1-l)P_B < l(1-P_A)");
    QueueSteady q;
    q.pi10 = num10 / den;
    const double d2 = lam * P_A + lbar * P_B;
    if (!(d2 > 0.0)) throw model_error("queue_steady: degenerate success probabilities");
    q.pi00 = lam * (1.0 - P_I) / d2 * q.pi10;
    q.pi11 = lbar > 0.0 ? lam / lbar * q.pi00 : 0.0;
    q.G0_1 = lam * lbar * (1.0 - P_I) / den;
    q.G1_1 = lam + lbar * q.pi10;
    return q;
}

AuxProbs aux_update(const std::vector<QueueSteady>& qs, const std::vector<UserParams>& params) {
    const int K = int(qs.size());
    AuxProbs aux{std::vector<double>(K), std::vector<double>(K)};
    auto clampp = [](double v, const char* what) {
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw model_error(std::string("aux_update: ") + what + " outside [0,1]");
        return std::clamp(v, 0.0, 1.0);
    };
    for (int i = 0; i < K; ++i) {
        if (params[i].lambda == 0.0) {
            aux.p11[i] = 0.0;
            aux.p02[i] = 1.0;
            continue;
        }
        const double d1 = qs[i].G1_1 - qs[i].pi10;
        if (!(d1 > 0.0)) throw model_error("aux_update: G1(1) - pi(1,0) <= 0");
        if (!(qs[i].G0_1 > 0.0)) throw model_error("aux_update: G0(1) <= 0");
        aux.p11[i] = clampp(1.0 - qs[i].pi11 / d1, "P(1|1)");
        aux.p02[i] = clampp(qs[i].pi00 / qs[i].G0_1, "P(0|2)");
    }
    return aux;
}

namespace {

struct EvalResult {
    AuxProbs aux;
    StatusDistribution status;
    SuccessProbs sp;
    std::vector<QueueSteady> queues;
};

EvalResult eval_map(const std::vector<UserParams>& params, const AuxProbs& aux,
                    const std::vector<double>* warm) {
    EvalResult r;
    r.status = stationary_impl(params, aux, warm);
    r.sp = success_probs(r.status, params);
    const int K = int(params.size());
    r.queues.resize(K);
    for (int i = 0; i < K; ++i) {
        if (params[i].lambda == 0.0) {
            r.queues[i] = QueueSteady{0.0, 1.0, 0.0, 0.0, 1.0};
            continue;
        }
        r.queues[i] = queue_steady(r.sp.P_I[i], r.sp.P_A[i], r.sp.P_B[i], params[i].lambda);
    }
    r.aux = aux_update(r.queues, params);
    return r;
}

} // namespace

Solution solve_model1(const std::vector<UserParams>& params, double tol, int max_iter) {
    check_params(params);
    const int K = int(params.size());

    AuxProbs x{std::vector<double>(K), std::vector<double>(K)};
    for (int i = 0; i < K; ++i) {
        x.p11[i] = params[i].lambda; // light-traffic initial guess
        x.p02[i] = 1.0 - params[i].lambda;
    }

    auto flat = [K](const AuxProbs& a) {
        std::vector<double> v(2 * K);
        for (int i = 0; i < K; ++i) {
            v[i] = a.p11[i];
            v[K + i] = a.p02[i];
        }
        return v;
    };
    auto unflat = [K](const std::vector<double>& v) {
        AuxProbs a{std::vector<double>(K), std::vector<double>(K)};
        for (int i = 0; i < K; ++i) {
            a.p11[i] = std::clamp(v[i], 0.0, 1.0);
            a.p02[i] = std::clamp(v[K + i], 0.0, 1.0);
        }
        return a;
    };

    std::vector<double> xv = flat(x);
    std::vector<double> prev_x, prev_f;
    std::vector<double> residuals;
    const std::vector<double>* warm = nullptr;
    std::vector<double> warm_store;
    int damped_left = 0;
    EvalResult last;

    for (int it = 1; it <= max_iter; ++it) {
        last = eval_map(params, unflat(xv), warm);
        warm_store = last.status.prob;
        warm = &warm_store;
        const std::vector<double> fv = flat(last.aux);

        double res = 0.0;
        for (std::size_t i = 0; i < xv.size(); ++i) res = std::fmax(res, std::fabs(fv[i] - xv[i]));
        residuals.push_back(res);
        if (res < tol) {
            Solution sol;
            sol.aux = unflat(fv);
            sol.sp = last.sp;
            sol.queues = last.queues;
            sol.status = last.status;
            sol.iterations = it;
            sol.residual = res;
            return sol;
        }

        // oscillation: residual grew twice in a row -> damped Picard spell
        const std::size_t n = residuals.size();
        if (damped_left == 0 && n >= 3 && residuals[n - 1] > residuals[n - 2] &&
            residuals[n - 2] > residuals[n - 3])
            damped_left = 3;

        std::vector<double> next(xv.size());
        if (damped_left > 0 || prev_x.empty()) {
            const double w = prev_x.empty() ? 1.0 : 0.5;
            for (std::size_t i = 0; i < xv.size(); ++i) next[i] = xv[i] + w * (fv[i] - xv[i]);
            if (damped_left > 0) --damped_left;
        } else {
            for (std::size_t i = 0; i < xv.size(); ++i) {
                const double dx = xv[i] - prev_x[i];
                double q = 0.0;
                if (std::fabs(dx) > 1e-14) {
                    const double s = (fv[i] - prev_f[i]) / dx;
                    if (std::fabs(s - 1.0) > 1e-12) q = std::clamp(s / (s - 1.0), -5.0, 0.9);
                }
                next[i] = q * xv[i] + (1.0 - q) * fv[i];
            }
        }
        prev_x = xv;
        prev_f = fv;
        for (auto& v : next) v = std::clamp(v, 0.0, 1.0);
        xv = std::move(next);
    }

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "solve_model1: no convergence after %d iterations, last residuals %.3e %.3e %.3e",
                  max_iter, residuals.size() > 2 ? residuals[residuals.size() - 3] : -1.0,
                  residuals.size() > 1 ? residuals[residuals.size() - 2] : -1.0,
                  residuals.back());
    throw model_error(buf);
}

SystemMetrics metrics_model1(const Solution& sol, const std::vector<UserParams>& params) {
    const int K = int(params.size());
    SystemMetrics out;
    out.per_user.resize(K);
    double dsum = 0.0, lsum = 0.0;
    for (int i = 0; i < K; ++i) {
        Metrics& m = out.per_user[i];
        const double lam = params[i].lambda, lbar = 1.0 - lam;
        if (lam == 0.0) {
            m = Metrics{0.0, 0.0, 0.0, 0.0, 0.0, false};
            continue;
        }
        const double P_I = sol.sp.P_I[i], P_A = sol.sp.P_A[i], P_B = sol.sp.P_B[i];
        const auto& q = sol.queues[i];
        m.applicable = true;
        m.L = lam * lam * lbar * (1.0 - P_I) /
              ((lbar * P_B - lam * (1.0 - P_A)) * (lbar * P_B - lam * (P_I - P_A)));
        m.W_q = m.L / lam;
        m.W_s = q.G0_1 / (1.0 - lbar * q.pi10) / P_B;
        m.D = m.W_q + m.W_s + 1.0;
        m.p_succ = (P_A * (q.G1_1 - q.pi10) + P_I * q.pi10 + P_B * q.G0_1) /
                   (params[i].p * (1.0 - q.pi10));
        dsum += m.D * lam;
        lsum += lam;
    }
    out.weighted_delay = lsum > 0.0 ? dsum / lsum : 0.0;
    return out;
}

} // namespace gesched::qmodel1

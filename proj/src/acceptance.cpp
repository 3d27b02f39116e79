#include "gesched/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "gesched/channel.hpp"
#include "gesched/dsched.hpp"
#include "gesched/evt.hpp"
#include "gesched/groups.hpp"
#include "gesched/kernels.hpp"
#include "gesched/mathx.hpp"
#include "gesched/qmodel1.hpp"
#include "gesched/qmodel2.hpp"
#include "gesched/qmodel3.hpp"
#include "gesched/sim.hpp"
#include "gesched/stats.hpp"

namespace gesched::acceptance {

namespace {

using channel::ChannelModel;

const ChannelModel kFigModel{0.1, 0.1, std::sqrt(2.0), 0.5, 0.0, 0.3};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Ctx {
    uint64_t seed;
    std::vector<std::string> notes;
    bool ok = true;
    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
    std::string detail() const {
        std::string d;
        for (std::size_t i = 0; i < notes.size(); ++i) {
            if (i) d += "; ";
            d += notes[i];
        }
        return d;
    }
};

// ---- 1: EVT reduction ----------------------------------------------------

void c1_evt_reduction(Ctx& c) {
    const ChannelModel good_only{0.0, 0.3, std::sqrt(2.0), 0.5, 0.0, 0.3};
    double worst = 0.0;
    for (const double K : {10.0, 1e3, 1e6}) {
        const auto mix = evt::norm_constants_mixture(K, good_only);
        const auto std_c = evt::norm_constants_gaussian(K, good_only.mu_g, good_only.sigma_g);
        worst = std::max(worst, std::fabs(mix.a_K - std_c.a_K));
        worst = std::max(worst, std::fabs(mix.b_K - std_c.b_K));
    }
    c.check(worst <= 1e-12, fmt("max |mixture - gaussian| = %.3e > 1e-12", worst));
    c.note(fmt("max deviation %.3e over K in {10,1e3,1e6}", worst));
}

// ---- 2: Gumbel fit (KS) ----------------------------------------------------

void c2_gumbel_fit(Ctx& c) {
    const int K = 5000, reps = 2000;
    sim::SimConfig cfg;
    cfg.K = K;
    cfg.model = kFigModel;
    cfg.capacity_mode = sim::CapacityMode::IIDMixture;
    cfg.horizon = reps;
    cfg.replications = 1;
    cfg.seed = c.seed + 2;
    auto res = sim::estimate_capacity_max(cfg);
    std::sort(res.samples.begin(), res.samples.end());

    const auto norm = evt::norm_constants_mixture(K, kFigModel);
    std::vector<double> cdf_gumbel(res.samples.size()), cdf_exact(res.samples.size());
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
        cdf_gumbel[i] = evt::gumbel_cdf(res.samples[i], norm);
        cdf_exact[i] = std::pow(channel::mixture_cdf(res.samples[i], kFigModel), double(K));
    }
    const double d = stats::ks_statistic(cdf_gumbel);
    const double d_crit = 1.6276 / std::sqrt(double(reps));
    const double d_exact = stats::ks_statistic(cdf_exact);
    c.check(d <= d_crit, fmt("KS D=%.4f > D_crit(0.01)=%.4f against Gumbel(a_K,b_K)", d, d_crit));
    c.note(fmt("D=%.4f, D_crit=%.4f; decomposition: D=%.4f vs the exact law H^K (%s), "
               "deterministic sup|H^K-Gumbel|=0.072 at this K (1/log K convergence)",
               d, d_crit, d_exact, d_exact <= d_crit ? "passes" : "fails"));
}

// ---- 3: distributed vs centralized ----------------------------------------

void c3_ratio(Ctx& c) {
    const double K = 1e5;
    const double ratio = dsched::expected_capacity_distributed(K, kFigModel).value /
                         evt::expected_capacity_centralized(K, kFigModel);
    const double dev = std::fabs(ratio - std::exp(-1.0));
    c.check(dev <= 0.02, fmt("|ratio - 1/e| = %.4f > 0.02", dev));
    c.note(fmt("ratio %.5f vs 1/e %.5f (dev %.5f)", ratio, std::exp(-1.0), dev));
}

// ---- 4: backlogged collision probability ----------------------------------

void c4_backlogged(Ctx& c) {
    const int K = 1000;
    sim::SimConfig cfg;
    cfg.K = K;
    cfg.model = kFigModel;
    cfg.backlogged = true;
    cfg.use_capacity = true;
    cfg.capacity_mode = sim::CapacityMode::ChainDependent;
    cfg.threshold_u = dsched::threshold_exact(K, kFigModel).u;
    cfg.horizon = 60000;
    cfg.warmup = 0;
    cfg.seed = c.seed + 4;
    const auto r = sim::run_slotted(cfg);
    const double target = 1.0 - std::exp(-1.0);
    const double dev = std::fabs(r.p_coll.mean - target);
    c.check(dev <= 0.02, fmt("|p_coll - (1-1/e)| = %.4f > 0.02", dev));
    c.note(fmt("empirical p_coll %.4f vs 1-1/e %.4f (finite-K exact %.4f)", r.p_coll.mean,
               target, qmodel2::p_coll_backlogged(K)));
}

// ---- 5: Poisson exceedance table -------------------------------------------

void c5_poisson_table(Ctx& c) {
    const int n = 10000;
    // iid Gaussian sequence at the tau = 1 level; the finite-n Poisson
    // parameter is n(1 - Phi(b_n))
    const double level = dsched::level_for_rate(1.0, n, 0.0, 1.0);
    const double tau = n * mathx::norm_sf(level);
    sim::SimConfig cfg;
    cfg.model = ChannelModel{0.1, 0.1, 0.0, 1.0, -9.0, 0.5};
    cfg.capacity_mode = sim::CapacityMode::IIDGaussian;
    cfg.seed = c.seed + 5;
    const int windows = 25000;
    const auto res = sim::exceedance_counts(cfg, level, n, windows);
    const double table[3] = {0.3961, 0.3668, 0.1698};
    for (int k = 0; k < 3; ++k) {
        const double emp =
            k < int(res.histogram.size()) ? double(res.histogram[k]) / windows : 0.0;
        c.check(std::fabs(emp - table[k]) <= 0.01,
                fmt("Pr(N=%d) = %.4f vs table %.4f (tol 0.01)", k, emp, table[k]));
        if (k == 0) c.note(fmt("tau(exact) = %.4f", tau));
        c.note(fmt("Pr(N=%d): %.4f vs %.4f", k, emp, table[k]));
    }
    // chain-dependent sequence at the mixture level passes the Poisson test
    const auto norm = evt::norm_constants_mixture(n, kFigModel);
    const double tau_chain = n * channel::mixture_sf(norm.b_K, kFigModel);
    sim::SimConfig cc;
    cc.model = kFigModel;
    cc.capacity_mode = sim::CapacityMode::ChainDependent;
    cc.seed = c.seed + 55;
    const auto rc = sim::exceedance_counts(cc, norm.b_K, n, 4000);
    std::vector<double> obs(rc.histogram.size()), expd(rc.histogram.size());
    for (std::size_t k = 0; k < rc.histogram.size(); ++k) {
        obs[k] = double(rc.histogram[k]);
        expd[k] = double(rc.windows) * stats::poisson_pmf(unsigned(k), tau_chain);
    }
    const auto gof = stats::chi2_test(obs, expd, 0.01);
    c.check(gof.pass, fmt("chain-dependent chi-square p = %.4f <= 0.01", gof.p_value));
    c.note(fmt("chain-dependent: tau %.4f, chi2 p %.3f", tau_chain, gof.p_value));
}

// ---- 6: Appendix D/E structural correctness --------------------------------

void c6_status_chain(Ctx& c) {
    rng::Stream rs(c.seed + 6);
    double worst_row = 0.0;
    double worst_sigma = 0.0;
    for (int K = 1; K <= 7; ++K) {
        std::vector<qmodel1::UserParams> params;
        for (int i = 0; i < K; ++i)
            params.push_back({0.03 + 0.06 * rs.next_u01(), 0.25 + 0.4 * rs.next_u01()});
        qmodel1::AuxProbs aux{std::vector<double>(K), std::vector<double>(K)};
        for (int i = 0; i < K; ++i) {
            aux.p11[i] = rs.next_u01();
            aux.p02[i] = rs.next_u01();
        }
        const auto states = qmodel1::enumerate_states(K);
        std::vector<std::size_t> rows;
        if (K <= 3)
            for (std::size_t s = 0; s < states.size(); ++s) rows.push_back(s);
        else
            for (int j = 0; j < 3; ++j)
                rows.push_back(std::size_t(rs.next_u01() * double(states.size())));

        for (const std::size_t s : rows) {
            double sum = 0.0;
            for (const auto& to : states)
                sum += qmodel1::status_transition_prob(states[s], to, params, aux);
            worst_row = std::max(worst_row, std::fabs(sum - 1.0));
        }

        // Monte Carlo slot oracle, 1e6 trials per row (K<=3 fully, 1 row above)
        const int trials = 1000000;
        std::vector<std::size_t> mc_rows = K <= 3 ? rows : std::vector<std::size_t>{rows[0]};
        for (const std::size_t s : mc_rows) {
            std::map<uint32_t, int> freq;
            auto enc = [](const qmodel1::StatusVector& v) {
                uint32_t x = 0;
                for (std::size_t i = 0; i < v.size(); ++i) x |= uint32_t(v[i]) << (2 * i);
                return x;
            };
            for (int t = 0; t < trials; ++t)
                ++freq[enc(qmodel1::sample_status_transition(states[s], params, aux, rs))];
            for (const auto& to : states) {
                const double p = qmodel1::status_transition_prob(states[s], to, params, aux);
                if (p * trials < 25.0) continue; // binomial band meaningless below
                const double emp = freq.count(enc(to)) ? double(freq.at(enc(to))) / trials : 0.0;
                const double sigma = std::sqrt(p * (1.0 - p) / trials);
                worst_sigma = std::max(worst_sigma, std::fabs(emp - p) / sigma);
            }
        }
    }
    c.check(worst_row <= 1e-10, fmt("worst |row sum - 1| = %.2e > 1e-10", worst_row));
    c.check(worst_sigma <= 3.0, fmt("worst MC deviation = %.2f sigma > 3", worst_sigma));
    c.note(fmt("row-sum deviation %.2e; worst MC cell %.2f sigma (cells with >=25 expected)",
               worst_row, worst_sigma));
}

// ---- 7: model I vs simulation ----------------------------------------------

void c7_model1_vs_sim(Ctx& c) {
    struct Case {
        int K;
        double lambda_total;
    };
    std::vector<Case> cases;
    const double lam_hi = (1.0 / std::exp(1.0)) * (1.0 - 0.001);
    for (int K = 2; K <= 10; ++K) cases.push_back({K, lam_hi});
    for (int K = 2; K <= 7; ++K) cases.push_back({K, 0.15});

    double worst_rel = 0.0, worst_ps = 0.0;
    std::string worst_what = "-";
    for (const auto& cs : cases) {
        const std::vector<qmodel1::UserParams> params(
            std::size_t(cs.K), qmodel1::UserParams{cs.lambda_total / cs.K, 1.0 / cs.K});
        const auto sol = qmodel1::solve_model1(params);
        const auto met = qmodel1::metrics_model1(sol, params);

        sim::SimConfig cfg;
        cfg.K = cs.K;
        cfg.attempt_prob = 1.0 / cs.K;
        cfg.lambda_per_user = cs.lambda_total / cs.K;
        cfg.horizon = 3000000;
        cfg.warmup = 600000;
        cfg.replications = 1;
        cfg.seed = c.seed + 700 + uint64_t(cs.K) + uint64_t(cs.lambda_total * 1000) * 64;
        const auto r = sim::run_slotted(cfg);

        const auto& m = met.per_user[0];
        const struct {
            const char* name;
            double model, simv;
        } rows[] = {
            {"L", m.L, r.mean_queue.mean},
            {"W_q", m.W_q, r.time_in_line.mean},
            {"W_s", m.W_s, r.service_time.mean},
        };
        for (const auto& row : rows) {
            const double rel = std::fabs(row.model - row.simv) / std::max(row.simv, 1e-9);
            if (rel > worst_rel) {
                worst_rel = rel;
                worst_what = fmt("%s at K=%d lamT=%.3f (model %.4f sim %.4f)", row.name, cs.K,
                                 cs.lambda_total, row.model, row.simv);
            }
        }
        worst_ps = std::max(worst_ps, std::fabs(m.p_succ - r.success_prob.mean));
    }
    c.check(worst_rel <= 0.10, fmt("worst relative metric error %.3f > 0.10 (%s)", worst_rel,
                                   worst_what.c_str()));
    c.check(worst_ps <= 0.03, fmt("worst |p_succ model - sim| = %.4f > 0.03", worst_ps));
    c.note(fmt("worst relative error %.3f (%s); worst p_succ dev %.4f", worst_rel,
               worst_what.c_str(), worst_ps));
}

// ---- 8: model II fixed point and service time -------------------------------

void c8_model2(Ctx& c) {
    // residual and bisection-oracle equivalence
    double worst_res = 0.0, worst_bis = 0.0;
    for (const double lam : {0.05, 0.15, 0.25, 0.33}) {
        const double p = qmodel2::solve_p_coll(lam, 1.0);
        worst_res = std::max(worst_res, std::fabs(p - (1.0 - std::exp(-lam / (1.0 - p)))));
        auto f = [&](double x) { return x - 1.0 + std::exp(-lam / (1.0 - x)); };
        double step = (1.0 - lam) / 4096.0, x0 = 0.0;
        while (x0 + step < 1.0 - lam && f(x0 + step) < 0.0) x0 += step;
        double lo = x0, hi = x0 + step;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        worst_bis = std::max(worst_bis, std::fabs(p - 0.5 * (lo + hi)));
    }
    c.check(worst_res < 1e-12, fmt("fixed-point residual %.2e >= 1e-12", worst_res));
    c.check(worst_bis < 1e-10, fmt("bisection-oracle deviation %.2e >= 1e-10", worst_bis));

    // service time vs the interdependent-queue simulation
    double worst_rel = 0.0;
    std::string what;
    for (const int K : {20, 50, 100}) {
        const double lam = 0.2 / K, tau = 1.0 / K;
        const auto m = qmodel2::metrics_model2(lam, tau, double(K));
        sim::SimConfig cfg;
        cfg.K = K;
        cfg.attempt_prob = tau;
        cfg.lambda_per_user = lam;
        cfg.horizon = 1500000;
        cfg.warmup = 300000;
        cfg.seed = c.seed + 800 + uint64_t(K);
        const auto r = sim::run_slotted(cfg);
        // the continuous service time spans head-of-line to departure, which
        // in the slotted system includes the transmission slot
        const double sim_service = r.service_time.mean + 1.0;
        const double rel = std::fabs(m.service_time - sim_service) / sim_service;
        if (rel > worst_rel) {
            worst_rel = rel;
            what = fmt("K=%d model %.2f sim %.2f", K, m.service_time, sim_service);
        }
    }
    c.check(worst_rel <= 0.10, fmt("service time off by %.3f > 0.10 (%s)", worst_rel, what.c_str()));
    c.note(fmt("residual %.1e, bisection dev %.1e, worst service-time rel err %.3f (%s)",
               worst_res, worst_bis, worst_rel, what.c_str()));
}

// ---- 9: model III reduction and agreement -----------------------------------

void c9_model3(Ctx& c) {
    // single-rate reduction
    const qmodel3::TDQueueParams eq{0.1, 0.6, 0.6, 0.1, 0.1, 1.0};
    const double q_eq = qmodel3::mean_queue(eq, qmodel3::solve_z0(eq));
    c.check(std::fabs(q_eq - 0.1 / 0.5) <= 1e-10,
            fmt("single-rate reduction |Q - l/(mu-l)| = %.2e > 1e-10", std::fabs(q_eq - 0.2)));

    double worst_ps = 0.0, worst_rel = 0.0;
    std::string what;
    for (const double lam_t : {0.1, 0.3}) {
        for (const int K : {10, 20, 50}) {
            const auto s = qmodel3::solve_model3(K, lam_t / K, 0.7 / K, 0.5 / K, 0.1, 0.1);
            sim::SimConfig cfg;
            cfg.K = K;
            cfg.state_dependent_attempt = true;
            // per-slot switch and exceedance probabilities of the exponential clocks
            cfg.model = kFigModel;
            cfg.model.alpha = -std::expm1(-0.1);
            cfg.model.beta = -std::expm1(-0.1);
            cfg.attempt_prob = -std::expm1(-0.7 / K);
            cfg.attempt_prob_bad = -std::expm1(-0.5 / K);
            cfg.arrivals = sim::ArrivalKind::PoissonRate;
            cfg.lambda_per_user = lam_t / K;
            cfg.horizon = 2000000;
            cfg.warmup = 400000;
            cfg.seed = c.seed + 900 + uint64_t(K) + uint64_t(lam_t * 10) * 256;
            const auto r = sim::run_slotted(cfg);
            worst_ps = std::max(worst_ps, std::fabs(s.p_succ - r.success_prob.mean));
            const double rel_q =
                std::fabs(s.mean_queue - r.mean_queue_incl.mean) / r.mean_queue_incl.mean;
            const double rel_w = std::fabs(s.wait - r.delay.mean) / r.delay.mean;
            const double rel = std::max(rel_q, rel_w);
            if (rel > worst_rel) {
                worst_rel = rel;
                what = fmt("K=%d lamT=%.1f (Q model %.3f sim %.3f, W model %.1f sim %.1f)", K,
                           lam_t, s.mean_queue, r.mean_queue_incl.mean, s.wait, r.delay.mean);
            }
        }
    }
    c.check(worst_ps <= 0.03, fmt("worst |p_succ model - sim| = %.4f > 0.03", worst_ps));
    c.check(worst_rel <= 0.10, fmt("worst Q/W relative error %.3f > 0.10 (%s)", worst_rel,
                                   what.c_str()));
    c.note(fmt("worst p_succ dev %.4f; worst Q/W rel err %.3f (%s)", worst_ps, worst_rel,
               what.c_str()));
}

// ---- 10: Appendix B structure ------------------------------------------------

void c10_groups(Ctx& c) {
    // exact row sums
    double worst_row = 0.0;
    for (const int K : {4, 10, 40}) {
        const auto chain = groups::transition_matrix(K, 0.1, 0.1);
        for (int i = 0; i <= K; ++i)
            worst_row = std::max(worst_row, std::fabs(chain.P.row(i).sum() - 1.0));
        // centrosymmetry and JP = PJ
        double worst_cs = 0.0;
        for (int i = 0; i <= K; ++i)
            for (int j = 0; j <= K; ++j)
                worst_cs = std::max(worst_cs, std::fabs(chain.P(i, j) - chain.P(K - i, K - j)));
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K + 1, K + 1);
        for (int i = 0; i <= K; ++i) J(i, K - i) = 1.0;
        const double comm = (J * chain.P - chain.P * J).cwiseAbs().maxCoeff();
        c.check(worst_cs <= 1e-12 && comm <= 1e-12,
                fmt("centrosymmetry %.1e / commutator %.1e at K=%d", worst_cs, comm, K));
        // stationary symmetry + unimodality
        const auto pi = groups::stationary_chain(chain);
        for (int i = 0; i <= K; ++i)
            c.check(std::fabs(pi(i) - pi(K - i)) <= 1e-10, fmt("pi symmetry at K=%d i=%d", K, i));
        for (int i = 0; i < K / 2; ++i)
            c.check(pi(i) <= pi(i + 1) + 1e-12, fmt("pi unimodality rising at K=%d i=%d", K, i));
        for (int i = K / 2; i < K; ++i)
            c.check(pi(i) + 1e-12 >= pi(i + 1), fmt("pi unimodality falling at K=%d i=%d", K, i));
    }
    c.check(worst_row <= 1e-12, fmt("row sums off by %.2e", worst_row));

    // K = 4 expectation vs brute-force Monte Carlo
    const double val = groups::expected_capacity_by_state(4, kFigModel, 10);
    rng::Stream rs(c.seed + 10);
    double acc = 0.0, acc2 = 0.0;
    const int trials = 1000000;
    for (int t = 0; t < trials; ++t) {
        double mx = -1e30;
        for (int u = 0; u < 4; ++u) {
            const auto s =
                rs.next_u01() < 0.5 ? channel::UserState::Good : channel::UserState::Bad;
            mx = std::max(mx, channel::sample_capacity(s, kFigModel, rs));
        }
        acc += mx;
        acc2 += mx * mx;
    }
    const double mean = acc / trials;
    const double se = std::sqrt((acc2 / trials - mean * mean) / trials);
    c.check(std::fabs(val - mean) <= 3.0 * se,
            fmt("E[max] K=4: numeric %.5f vs MC %.5f +- %.5f", val, mean, se));
    c.note(fmt("E[max] K=4 numeric %.5f, MC %.5f (3se %.5f)", val, mean, 3.0 * se));

    // both lower bounds stay below the numeric expectation
    const double e20 = groups::expected_capacity_by_state(20, kFigModel, 30);
    const double mode20 = groups::capacity_lower_bound_mode(20, kFigModel);
    c.check(mode20 <= e20, fmt("mode bound %.4f above expectation %.4f", mode20, e20));
    for (int delta = 0; delta <= 7; ++delta) {
        const double db = groups::capacity_lower_bound_delta(20, kFigModel, delta).sum;
        c.check(db <= e20, fmt("delta bound (delta=%d) %.4f above expectation %.4f", delta, db, e20));
    }
    c.note(fmt("E20 %.4f, mode bound %.4f", e20, mode20));
}

// ---- 11: determinism ----------------------------------------------------------

std::string determinism_probe(uint64_t seed) {
    std::ostringstream os;
    sim::SimConfig cfg;
    cfg.K = 5;
    cfg.attempt_prob = 0.2;
    cfg.lambda_per_user = 0.05;
    cfg.horizon = 50000;
    cfg.seed = seed;
    cfg.replications = 2;
    const auto r = sim::run_slotted(cfg);
    os.precision(17);
    os << r.mean_queue.mean << "," << r.delay.mean << "," << r.success_prob.mean << ","
       << r.total_arrivals << "," << r.total_departures << ";";
    sim::SimConfig ec;
    ec.model = kFigModel;
    ec.seed = seed + 1;
    const auto x = sim::exceedance_counts(ec, 3.0, 1000, 50);
    for (const auto h : x.histogram) os << h << ",";
    const auto sol = qmodel1::solve_model1(
        std::vector<qmodel1::UserParams>(3, qmodel1::UserParams{0.04, 1.0 / 3.0}));
    os << ";" << sol.aux.p11[0] << "," << sol.aux.p02[0];
    return os.str();
}

void c11_determinism(Ctx& c) {
    const std::string a = determinism_probe(c.seed + 11);
    const std::string b = determinism_probe(c.seed + 11);
    c.check(a == b, "repeated runs with the same seed differ");
    c.note(a == b ? "probe reports byte-identical" : "probe reports differ");
}

} // namespace

// Byte-stable report: no timings here, so two runs with the same seed
// compare equal. Timings live in CriterionResult::seconds for callers.
std::string Report::text() const {
    std::ostringstream os;
    os << "acceptance seed=" << seed << "\n";
    for (const auto& r : criteria) {
        char line[640];
        std::snprintf(line, sizeof line, "[%s] criterion %2d %-26s %s\n",
                      r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
        os << line;
    }
    os << (all_pass ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
    return os.str();
}

Report run(uint64_t seed, const std::vector<int>& only) {
    const struct {
        int id;
        const char* name;
        void (*fn)(Ctx&);
    } table[] = {
        {1, "evt-reduction-exact", c1_evt_reduction},
        {2, "gumbel-fit-ks", c2_gumbel_fit},
        {3, "distributed-ratio", c3_ratio},
        {4, "backlogged-collision", c4_backlogged},
        {5, "poisson-exceedance-table", c5_poisson_table},
        {6, "status-chain-structure", c6_status_chain},
        {7, "model1-vs-sim", c7_model1_vs_sim},
        {8, "model2-fixed-point", c8_model2},
        {9, "model3-agreement", c9_model3},
        {10, "group-chain-structure", c10_groups},
        {11, "determinism", c11_determinism},
    };
    Report rep;
    rep.seed = seed;
    for (const auto& t : table) {
        if (!only.empty() && std::find(only.begin(), only.end(), t.id) == only.end()) continue;
        Ctx ctx{seed, {}, true};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            t.fn(ctx);
        } catch (const std::exception& e) {
            ctx.ok = false;
            ctx.note(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.criteria.push_back({t.id, t.name, ctx.ok, ctx.detail(), secs});
        rep.all_pass = rep.all_pass && ctx.ok;
    }
    return rep;
}

} // namespace gesched::acceptance

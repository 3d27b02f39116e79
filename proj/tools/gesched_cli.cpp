// gesched: analytics and simulation for threshold scheduling over a
// Gilbert-Elliott channel. Subcommands: capacity, threshold, groups,
// queueing, simulate, validate.
//
// Exit codes: 0 success, 1 usage error, 2 numerical/model error,
// 3 validation failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gesched/acceptance.hpp"
#include "gesched/channel.hpp"
#include "gesched/dsched.hpp"
#include "gesched/errors.hpp"
#include "gesched/evt.hpp"
#include "gesched/groups.hpp"
#include "gesched/qmodel1.hpp"
#include "gesched/qmodel2.hpp"
#include "gesched/qmodel3.hpp"
#include "gesched/sim.hpp"

namespace {

using gesched::channel::ChannelModel;

// ---------------------------------------------------------------------------
// tabular output: fixed column schema per command, CSV or JSON

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> r) { rows.push_back(std::move(r)); }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ',';
            out += columns[i];
        }
        out += '\n';
        char buf[64];
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                if (const auto* d = std::get_if<double>(&r[i])) {
                    std::snprintf(buf, sizeof buf, "%.12g", *d);
                    out += buf;
                } else if (const auto* l = std::get_if<long long>(&r[i])) {
                    std::snprintf(buf, sizeof buf, "%lld", *l);
                    out += buf;
                } else {
                    out += std::get<std::string>(r[i]);
                }
            }
            out += '\n';
        }
        return out;
    }

    std::string to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json obj;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (const auto* d = std::get_if<double>(&r[i]))
                    obj[columns[i]] = *d;
                else if (const auto* l = std::get_if<long long>(&r[i]))
                    obj[columns[i]] = *l;
                else
                    obj[columns[i]] = std::get<std::string>(r[i]);
            }
            arr.push_back(std::move(obj));
        }
        return arr.dump(2) + "\n";
    }
};

struct OutputOpts {
    std::string format = "csv";
    std::string out_path;
};

void emit(const Table& t, const OutputOpts& o) {
    const std::string text = o.format == "json" ? t.to_json() : t.to_csv();
    if (o.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + o.out_path);
    f << text;
}

// ---------------------------------------------------------------------------

struct ModelFlags {
    double alpha = 0.1, beta = 0.1;
    double mu_g = std::sqrt(2.0), sigma_g = 0.5;
    double mu_b = 0.0, sigma_b = 0.3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "P(Good->Bad) per slot");
        cmd->add_option("--beta", beta, "P(Bad->Good) per slot");
        cmd->add_option("--mu-g", mu_g, "Good-state capacity mean");
        cmd->add_option("--sigma-g", sigma_g, "Good-state capacity std");
        cmd->add_option("--mu-b", mu_b, "Bad-state capacity mean");
        cmd->add_option("--sigma-b", sigma_b, "Bad-state capacity std");
    }

    ChannelModel model() const {
        const ChannelModel m{alpha, beta, mu_g, sigma_g, mu_b, sigma_b};
        m.validate();
        if (!m.good_tail_dominates())
            std::fprintf(stderr,
                         "warning: mu_g < mu_b with sigma_g > sigma_b; the asymptotic "
                         "formulas assume the good-state tail dominates\n");
        return m;
    }
};

std::vector<double> expand_sweep(const std::vector<double>& ks) {
    if (ks.empty()) return {1000.0};
    return ks;
}

// ---------------------------------------------------------------------------

int cmd_capacity(const ModelFlags& mf, const std::vector<double>& ks, int phi, bool simulate,
                 long long slots, int reps, uint64_t seed, const OutputOpts& out) {
    const auto m = mf.model();
    Table t;
    t.columns = {"K",      "alpha",  "beta",        "mu_g",          "sigma_g",
                 "mu_b",   "sigma_b", "p_good",     "a_K",           "b_K",
                 "cap_centralized", "cap_good_only", "cap_distributed",
                 "util_asymptotic", "util_finite_k", "threshold_asymptotic", "threshold_exact"};
    if (simulate) {
        t.columns.push_back("sim_max_mean");
        t.columns.push_back("sim_max_halfwidth");
    }
    for (const double K : expand_sweep(ks)) {
        const auto n = gesched::evt::norm_constants_mixture(K, m);
        const auto d = gesched::dsched::expected_capacity_distributed(K, m);
        const auto [p, q] = gesched::channel::stationary_state_probs(m);
        (void)q;
        double good_only = std::nan("");
        if (p * K >= 3.0) good_only = gesched::evt::expected_capacity_good_only(K, m);
        std::vector<Cell> row{K,
                              m.alpha,
                              m.beta,
                              m.mu_g,
                              m.sigma_g,
                              m.mu_b,
                              m.sigma_b,
                              p,
                              n.a_K,
                              n.b_K,
                              gesched::evt::expected_capacity_centralized(K, m),
                              good_only,
                              d.value,
                              d.utilization_asymptotic,
                              d.utilization_finite_k,
                              d.threshold,
                              gesched::dsched::threshold_exact(K, m).u};
        if (simulate) {
            gesched::sim::SimConfig cfg;
            cfg.K = int(K);
            cfg.model = m;
            cfg.capacity_mode = gesched::sim::CapacityMode::IIDMixture;
            cfg.horizon = slots;
            cfg.replications = reps;
            cfg.seed = seed;
            const auto r = gesched::sim::estimate_capacity_max(cfg);
            row.push_back(r.mean.mean);
            row.push_back(r.mean.half_width);
        }
        t.add_row(std::move(row));
        (void)phi;
    }
    emit(t, out);
    return 0;
}

int cmd_threshold(const ModelFlags& mf, const std::vector<double>& ks, const OutputOpts& out) {
    const auto m = mf.model();
    Table t;
    t.columns = {"K", "method", "u", "exceed_prob"};
    for (const double K : expand_sweep(ks)) {
        const auto a = gesched::dsched::threshold_asymptotic(K, m);
        const auto e = gesched::dsched::threshold_exact(K, m);
        const auto r = gesched::dsched::threshold_refined_gaussian(K, m.mu_g, m.sigma_g);
        for (const auto& plan : {a, e, r})
            t.add_row({plan.K, std::string(gesched::dsched::method_name(plan.method)), plan.u,
                       plan.exceed_prob});
    }
    emit(t, out);
    return 0;
}

int cmd_groups(const ModelFlags& mf, double K, int phi, bool matrix, bool expectation,
               const OutputOpts& out) {
    const auto m = mf.model();
    const auto chain = gesched::groups::transition_matrix(int(K), m.alpha, m.beta);
    Table t;
    if (matrix) {
        t.columns = {"i", "j", "P_ij"};
        for (int i = 0; i <= chain.K; ++i)
            for (int j = 0; j <= chain.K; ++j) t.add_row({double(i), double(j), chain.P(i, j)});
    } else if (expectation) {
        t.columns = {"K", "expected_capacity", "bound_mode", "bound_delta_best"};
        const double e = gesched::groups::expected_capacity_by_state(int(K), m, phi);
        double mode = std::nan(""), best = std::nan("");
        if (m.alpha == m.beta && int(K) % 2 == 0 && int(K) / 2 >= 3) {
            mode = gesched::groups::capacity_lower_bound_mode(int(K), m);
            best = 0.0;
            for (int d = 0; d + 3 <= int(K) / 2; ++d)
                best = std::max(best,
                                gesched::groups::capacity_lower_bound_delta(int(K), m, d).sum);
        }
        t.add_row({K, e, mode, best});
    } else {
        t.columns = {"i", "pi_i"};
        const auto pi = gesched::groups::stationary_chain(chain);
        for (int i = 0; i <= chain.K; ++i) t.add_row({double(i), pi(i)});
    }
    emit(t, out);
    return 0;
}

gesched::sim::SimResult run_queueing_sim(int K, double lambda_total, double p_attempt,
                                         long long slots, uint64_t seed) {
    gesched::sim::SimConfig cfg;
    cfg.K = K;
    cfg.attempt_prob = p_attempt;
    cfg.lambda_per_user = lambda_total / K;
    cfg.horizon = slots;
    cfg.seed = seed;
    return gesched::sim::run_slotted(cfg);
}

int cmd_queueing(const std::string& model, const ModelFlags& mf, const std::vector<double>& ks,
                 const std::vector<double>& lambda_ts, double mu_g_rate, double mu_b_rate,
                 double alpha_rate, double beta_rate, std::optional<double> tau_opt,
                 bool simulate, long long slots, uint64_t seed, const OutputOpts& out) {
    Table t;
    const auto lams = lambda_ts.empty() ? std::vector<double>{0.15} : lambda_ts;
    if (model == "model1") {
        t.columns = {"model", "K", "lambda_total", "lambda_i", "p_i",
                     "L", "W_q", "W_s", "D", "p_succ"};
        if (simulate) {
            for (const char* s : {"sim_L", "sim_W_q", "sim_W_s", "sim_D", "sim_p_succ"})
                t.columns.push_back(s);
        }
        for (const double K : expand_sweep(ks)) {
            if (K > gesched::qmodel1::kMaxUsers)
                throw std::invalid_argument(
                    "model1: K > 10 is not tractable, the status space has 2^(K-1)(K+2) states");
            for (const double lt : lams) {
                const std::vector<gesched::qmodel1::UserParams> params(
                    std::size_t(K), {lt / K, 1.0 / K});
                const auto sol = gesched::qmodel1::solve_model1(params);
                const auto met = gesched::qmodel1::metrics_model1(sol, params);
                const auto& m0 = met.per_user[0];
                std::vector<Cell> row{std::string("model1"), K, lt, lt / K, 1.0 / K,
                                      m0.L, m0.W_q, m0.W_s, m0.D, m0.p_succ};
                if (simulate) {
                    const auto r = run_queueing_sim(int(K), lt, 1.0 / K, slots, seed);
                    row.insert(row.end(), {r.mean_queue.mean, r.time_in_line.mean,
                                           r.service_time.mean, r.delay.mean,
                                           r.success_prob.mean});
                }
                t.add_row(std::move(row));
            }
        }
    } else if (model == "model2") {
        t.columns = {"model", "K", "lambda", "tau", "p_coll", "p_succ",
                     "service_time", "wait", "queue_len"};
        if (simulate) t.columns.push_back("sim_service_time");
        for (const double K : expand_sweep(ks)) {
            for (const double lt : lams) {
                const double tau = tau_opt ? *tau_opt : 1.0 / K;
                const double lam = lt / K;
                const auto m = gesched::qmodel2::metrics_model2(lam, tau, K);
                std::vector<Cell> row{std::string("model2"), K, lam, tau, m.p_coll,
                                      m.p_succ, m.service_time, m.wait, m.queue_len};
                if (simulate) {
                    const auto r = run_queueing_sim(int(K), lt, tau, slots, seed);
                    row.push_back(r.service_time.mean + 1.0);
                }
                t.add_row(std::move(row));
            }
        }
    } else if (model == "model3") {
        t.columns = {"model", "K", "lambda", "mu_g", "mu_b", "alpha", "beta",
                     "p_succ", "Q", "W", "pi_g0", "pi_b0", "z0"};
        if (simulate) {
            for (const char* s : {"sim_p_succ", "sim_Q", "sim_W"}) t.columns.push_back(s);
        }
        for (const double K : expand_sweep(ks)) {
            for (const double lt : lams) {
                const auto s = gesched::qmodel3::solve_model3(K, lt / K, mu_g_rate / K,
                                                              mu_b_rate / K, alpha_rate,
                                                              beta_rate);
                std::vector<Cell> row{std::string("model3"), K, lt / K, mu_g_rate / K,
                                      mu_b_rate / K, alpha_rate, beta_rate, s.p_succ,
                                      s.mean_queue, s.wait, s.pi_g0, s.pi_b0, s.z0};
                if (simulate) {
                    gesched::sim::SimConfig cfg;
                    cfg.K = int(K);
                    cfg.state_dependent_attempt = true;
                    cfg.model = mf.model();
                    cfg.model.alpha = -std::expm1(-alpha_rate);
                    cfg.model.beta = -std::expm1(-beta_rate);
                    cfg.attempt_prob = -std::expm1(-mu_g_rate / K);
                    cfg.attempt_prob_bad = -std::expm1(-mu_b_rate / K);
                    cfg.arrivals = gesched::sim::ArrivalKind::PoissonRate;
                    cfg.lambda_per_user = lt / K;
                    cfg.horizon = slots;
                    cfg.seed = seed;
                    const auto r = gesched::sim::run_slotted(cfg);
                    row.insert(row.end(),
                               {r.success_prob.mean, r.mean_queue_incl.mean, r.delay.mean});
                }
                t.add_row(std::move(row));
            }
        }
    } else {
        throw std::invalid_argument("queueing: model must be model1, model2 or model3");
    }
    emit(t, out);
    return 0;
}

int cmd_simulate(const ModelFlags& mf, int K, double lambda_total, std::string access,
                 double attempt, std::string arrivals, long long slots, long long warmup,
                 int reps, uint64_t seed, bool backlogged, bool no_collisions,
                 const OutputOpts& out) {
    gesched::sim::SimConfig cfg;
    cfg.K = K;
    cfg.lambda_per_user = K > 0 ? lambda_total / K : 0.0;
    cfg.horizon = slots;
    cfg.warmup = warmup;
    cfg.replications = reps;
    cfg.seed = seed;
    cfg.backlogged = backlogged;
    cfg.collisions = !no_collisions;
    cfg.arrivals = arrivals == "poisson" ? gesched::sim::ArrivalKind::PoissonRate
                                         : gesched::sim::ArrivalKind::BernoulliPerSlot;
    if (access == "threshold-exact") {
        cfg.use_capacity = true;
        cfg.model = mf.model();
        cfg.threshold_u = gesched::dsched::threshold_exact(K, cfg.model).u;
    } else if (access == "threshold-asymptotic") {
        cfg.use_capacity = true;
        cfg.model = mf.model();
        cfg.threshold_u = gesched::dsched::threshold_asymptotic(K, cfg.model).u;
    } else if (access == "attempt-prob") {
        cfg.attempt_prob = attempt > 0.0 ? attempt : 1.0 / K;
    } else {
        throw std::invalid_argument(
            "simulate: access must be threshold-exact, threshold-asymptotic or attempt-prob");
    }
    const auto r = gesched::sim::run_slotted(cfg);
    Table t;
    t.columns = {"metric", "estimate", "half_width", "replications"};
    const struct {
        const char* name;
        const gesched::sim::Estimate& e;
    } rows[] = {
        {"mean_queue", r.mean_queue},       {"mean_queue_incl", r.mean_queue_incl},
        {"time_in_line", r.time_in_line},   {"service_time", r.service_time},
        {"delay", r.delay},                 {"success_prob", r.success_prob},
        {"p_coll", r.p_coll},               {"throughput", r.throughput},
        {"empty_frac", r.empty_frac},
    };
    for (const auto& row : rows)
        t.add_row({std::string(row.name), row.e.mean, row.e.half_width,
                   (long long)row.e.replications});
    t.add_row({std::string("total_arrivals"), double(r.total_arrivals), 0.0, (long long)reps});
    t.add_row({std::string("total_departures"), double(r.total_departures), 0.0,
               (long long)reps});
    t.add_row({std::string("final_backlog"), double(r.final_backlog), 0.0, (long long)reps});
    emit(t, out);
    return 0;
}

int cmd_validate(uint64_t seed, const std::vector<int>& only, const std::string& out_path) {
    const auto rep = gesched::acceptance::run(seed, only);
    const std::string text = rep.text();
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        f << text;
    }
    return rep.all_pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytics and slotted simulation for threshold scheduling over a "
                 "Gilbert-Elliott channel"};
    app.set_config("--config", "", "flat key-value config file with one section per command");
    app.require_subcommand(1);

    OutputOpts out;
    uint64_t seed = 1;
    app.add_option("--format", out.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out.out_path, "output path (default stdout)");
    app.add_option("--seed", seed, "base RNG seed");

    // capacity
    auto* cap = app.add_subcommand("capacity", "EVT capacity predictions per K");
    ModelFlags cap_mf;
    cap_mf.attach(cap);
    std::vector<double> cap_ks;
    int cap_phi = 30;
    bool cap_sim = false;
    long long cap_slots = 2000;
    int cap_reps = 1;
    cap->add_option("--K", cap_ks, "population sizes (repeatable)");
    cap->add_option("--phi", cap_phi, "EVT group-size cutoff");
    cap->add_flag("--simulate", cap_sim, "add simulated max-capacity columns");
    cap->add_option("--sim-slots", cap_slots, "simulated slots per replication");
    cap->add_option("--sim-reps", cap_reps, "simulation replications");

    // threshold
    auto* thr = app.add_subcommand("threshold", "threshold plans (all three methods)");
    ModelFlags thr_mf;
    thr_mf.attach(thr);
    std::vector<double> thr_ks;
    thr->add_option("--K", thr_ks, "population sizes (repeatable)");

    // groups
    auto* grp = app.add_subcommand("groups", "group-size chain: stationary vector, matrix, "
                                             "expected capacity and bounds");
    ModelFlags grp_mf;
    grp_mf.attach(grp);
    double grp_k = 20;
    int grp_phi = 30;
    bool grp_matrix = false, grp_exp = false;
    grp->add_option("--K", grp_k, "population size");
    grp->add_option("--phi", grp_phi, "EVT group-size cutoff");
    grp->add_flag("--matrix", grp_matrix, "emit the transition matrix instead");
    grp->add_flag("--expected", grp_exp, "emit expected capacity and lower bounds");

    // queueing
    auto* que = app.add_subcommand("queueing", "queueing models I-III, analytic vs simulated");
    ModelFlags que_mf;
    que_mf.attach(que);
    std::string que_model = "model1";
    std::vector<double> que_ks, que_lams;
    double que_mug = 0.7, que_mub = 0.5, que_alpha = 0.1, que_beta = 0.1;
    std::optional<double> que_tau;
    bool que_sim = false;
    long long que_slots = 1000000;
    que->add_option("--model", que_model, "model1 | model2 | model3");
    que->add_option("--K", que_ks, "population sizes (repeatable)");
    que->add_option("--lambda-total", que_lams, "total arrival rates, split across users");
    que->add_option("--mu-g-rate", que_mug, "model3: total good exceedance rate");
    que->add_option("--mu-b-rate", que_mub, "model3: total bad exceedance rate");
    que->add_option("--alpha-rate", que_alpha, "model3: good->bad switch rate");
    que->add_option("--beta-rate", que_beta, "model3: bad->good switch rate");
    double que_tau_val = -1.0;
    que->add_option("--tau", que_tau_val, "model2: exceedance rate (default 1/K)");
    que->add_flag("--simulate", que_sim, "add simulated columns");
    que->add_option("--sim-slots", que_slots, "simulated slots");

    // simulate
    auto* simc = app.add_subcommand("simulate", "slotted Monte Carlo of the interacting queues");
    ModelFlags sim_mf;
    sim_mf.attach(simc);
    int sim_k = 10;
    double sim_lam = 0.2, sim_attempt = -1.0;
    std::string sim_access = "attempt-prob", sim_arrivals = "bernoulli";
    long long sim_slots = 100000, sim_warmup = -1;
    int sim_reps = 1;
    bool sim_backlogged = false, sim_nocoll = false;
    simc->add_option("--K", sim_k, "number of users");
    simc->add_option("--lambda-total", sim_lam, "total arrival rate");
    simc->add_option("--access", sim_access,
                     "threshold-exact | threshold-asymptotic | attempt-prob");
    simc->add_option("--attempt-prob", sim_attempt, "explicit attempt probability (default 1/K)");
    simc->add_option("--arrivals", sim_arrivals, "bernoulli | poisson");
    simc->add_option("--slots", sim_slots, "horizon in slots");
    simc->add_option("--warmup", sim_warmup, "warmup slots (default 20% of horizon)");
    simc->add_option("--replications", sim_reps, "independent replications");
    simc->add_flag("--backlogged", sim_backlogged, "all queues always full");
    simc->add_flag("--no-collisions", sim_nocoll, "vanishing-transmission-time scenario");

    // validate
    auto* val = app.add_subcommand("validate", "run the acceptance criteria");
    std::vector<int> val_only;
    val->add_option("--criteria", val_only, "run only these criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (cap->parsed())
            return cmd_capacity(cap_mf, cap_ks, cap_phi, cap_sim, cap_slots, cap_reps, seed, out);
        if (thr->parsed()) return cmd_threshold(thr_mf, thr_ks, out);
        if (grp->parsed()) return cmd_groups(grp_mf, grp_k, grp_phi, grp_matrix, grp_exp, out);
        if (que->parsed()) {
            if (que_tau_val > 0.0) que_tau = que_tau_val;
            return cmd_queueing(que_model, que_mf, que_ks, que_lams, que_mug, que_mub, que_alpha,
                                que_beta, que_tau, que_sim, que_slots, seed, out);
        }
        if (simc->parsed())
            return cmd_simulate(sim_mf, sim_k, sim_lam, sim_access, sim_attempt, sim_arrivals,
                                sim_slots, sim_warmup, sim_reps, seed, sim_backlogged, sim_nocoll,
                                out);
        if (val->parsed()) return cmd_validate(seed, val_only, out.out_path);
    } catch (const gesched::model_error& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

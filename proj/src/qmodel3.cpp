#include "gesched/qmodel3.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "gesched/errors.hpp"

namespace gesched::qmodel3 {

void TDQueueParams::validate() const {
    if (!(lambda >= 0.0) || !(mu_g >= 0.0) || !(mu_b >= 0.0) || !(alpha >= 0.0) ||
        !(beta >= 0.0))
        throw std::invalid_argument("TDQueueParams: rates must be nonnegative");
    if (!(alpha + beta > 0.0))
        throw std::invalid_argument("TDQueueParams: alpha + beta must be positive");
    if (!(mu_g > 0.0) || !(mu_b > 0.0))
        throw std::invalid_argument("TDQueueParams: service rates must be positive");
    if (!(p_succ > 0.0 && p_succ <= 1.0))
        throw std::invalid_argument("TDQueueParams: p_succ must lie in (0, 1]");
}

std::array<double, 4> cubic_coeffs(const TDQueueParams& p) {
    p.validate();
    const double l = p.lambda, mg = p.mu_g_eff(), mb = p.mu_b_eff();
    return {
        l * l,                                                        // z^3
        -(p.alpha * l + p.beta * l + l * l + l * mb + l * mg),        // z^2
        p.alpha * mb + p.beta * mg + mg * mb + l * mb + l * mg,       // z^1
        -mg * mb,                                                     // z^0
    };
}

double eval_cubic(const std::array<double, 4>& c, double z) {
    return ((c[0] * z + c[1]) * z + c[2]) * z + c[3];
}

namespace {

std::vector<double> real_roots(const std::array<double, 4>& c) {
    std::vector<double> roots;
    if (c[0] != 0.0) {
        Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
        companion(0, 2) = -c[3] / c[0];
        companion(1, 2) = -c[2] / c[0];
        companion(2, 2) = -c[1] / c[0];
        companion(1, 0) = 1.0;
        companion(2, 1) = 1.0;
        const Eigen::EigenSolver<Eigen::Matrix3d> es(companion);
        for (int i = 0; i < 3; ++i) {
            const auto ev = es.eigenvalues()(i);
            if (std::fabs(ev.imag()) < 1e-9 * std::fmax(1.0, std::fabs(ev.real())))
                roots.push_back(ev.real());
        }
    } else if (c[1] != 0.0) {
        const double disc = c[2] * c[2] - 4.0 * c[1] * c[3];
        if (disc >= 0.0) {
            roots.push_back((-c[2] + std::sqrt(disc)) / (2.0 * c[1]));
            roots.push_back((-c[2] - std::sqrt(disc)) / (2.0 * c[1]));
        }
    } else if (c[2] != 0.0) {
        roots.push_back(-c[3] / c[2]);
    }
    // Newton polish
    for (double& z : roots) {
        for (int it = 0; it < 4; ++it) {
            const double f = eval_cubic(c, z);
            const double d = (3.0 * c[0] * z + 2.0 * c[1]) * z + c[2];
            if (d == 0.0) break;
            z -= f / d;
        }
    }
    return roots;
}

std::pair<double, double> empty_probs_unchecked(const TDQueueParams& p, double z0) {
    const double mg = p.mu_g_eff(), mb = p.mu_b_eff(), l = p.lambda;
    const double drain = p.mu_hat() - l;
    const double dg = mg * (1.0 - z0) * (mb - l * z0);
    const double db = mb * (1.0 - z0) * (mg - l * z0);
    return {p.beta * drain * z0 / dg, p.alpha * drain * z0 / db};
}

bool admissible(const TDQueueParams& p, double z0) {
    if (!(z0 > 1e-12 && z0 < 1.0 - 1e-12)) return false;
    const double mg = p.mu_g_eff(), mb = p.mu_b_eff(), l = p.lambda;
    if (std::fabs(mb - l * z0) < 1e-14 || std::fabs(mg - l * z0) < 1e-14) return false;
    const auto [pg0, pb0] = empty_probs_unchecked(p, z0);
    const double tol = 1e-9;
    if (!(pg0 >= -tol && pg0 <= p.pi_g() + tol)) return false;
    if (!(pb0 >= -tol && pb0 <= p.pi_b() + tol)) return false;
    // generating functions nonnegative on a z-grid in [0, 1]
    const auto c = cubic_coeffs(p);
    for (int i = 0; i <= 10; ++i) {
        const double z = i / 10.0;
        const double g = eval_cubic(c, z);
        if (std::fabs(g) < 1e-14) continue; // the removable point itself
        const double num_g = p.beta * (p.mu_hat() - l) * z + pg0 * mg * (1.0 - z) * (l * z - mb);
        const double num_b = p.alpha * (p.mu_hat() - l) * z + pb0 * mb * (1.0 - z) * (l * z - mg);
        if (num_g / g < -1e-7 || num_b / g < -1e-7) return false;
    }
    return true;
}

} // namespace

double solve_z0(const TDQueueParams& p) {
    p.validate();
    if (!(p.mu_hat() > p.lambda))
        throw model_error("solve_z0: unstable, average service rate below arrival rate");
    const auto c = cubic_coeffs(p);
    const auto roots = real_roots(c);
    std::vector<double> ok;
    for (const double z : roots)
        if (admissible(p, z)) ok.push_back(z);
    if (ok.size() == 1) return ok[0];
    std::string msg = ok.empty() ? "solve_z0: no admissible root; real roots:"
                                 : "solve_z0: several admissible roots:";
    for (const double z : roots) {
        char buf[40];
        std::snprintf(buf, sizeof buf, " %.12g", z);
        msg += buf;
    }
    throw model_error(msg);
}

std::pair<double, double> empty_probs(const TDQueueParams& p, double z0) {
    p.validate();
    if (std::fabs(1.0 - z0) < 1e-14)
        throw model_error("empty_probs: z0 = 1 is singular");
    if (std::fabs(p.mu_b_eff() - p.lambda * z0) < 1e-14 ||
        std::fabs(p.mu_g_eff() - p.lambda * z0) < 1e-14)
        throw model_error("empty_probs: singular denominator mu' - lambda z0");
    return empty_probs_unchecked(p, z0);
}

SteadyTable steady_recursion(const TDQueueParams& p, double z0, int m_max) {
    const auto [pg0, pb0] = empty_probs(p, z0);
    const double mg = p.mu_g_eff(), mb = p.mu_b_eff(), l = p.lambda;
    SteadyTable t;
    t.pi_g = {pg0};
    t.pi_b = {pb0};
    // compensated running sums of the two partial masses
    double sg = 0.0, cg = 0.0, sb = 0.0, cb = 0.0;
    auto acc = [](double& s, double& comp, double v) {
        const double y = v - comp;
        const double tt = s + y;
        comp = (tt - s) - y;
        s = tt;
    };
    const int cap = std::max(m_max, 200000);
    for (int m = 1; m <= cap; ++m) {
        acc(sg, cg, t.pi_g[m - 1]);
        acc(sb, cb, t.pi_b[m - 1]);
        const double g_m = t.pi_g[m - 1] * l / mg + sg * p.alpha / mg - sb * p.beta / mg;
        const double b_m = t.pi_b[m - 1] * l / mb + sb * p.beta / mb - sg * p.alpha / mb;
        if (g_m < -1e-9 || b_m < -1e-9)
            throw model_error("steady_recursion: negative probability, recursion unstable");
        t.pi_g.push_back(std::max(g_m, 0.0));
        t.pi_b.push_back(std::max(b_m, 0.0));
        if (m >= m_max) {
            const double tail = 1.0 - (sg + t.pi_g[m]) - (sb + t.pi_b[m]);
            if (tail < 1e-6) break;
        }
    }
    return t;
}

double mean_queue(const TDQueueParams& p, double z0) {
    const auto [pg0, pb0] = empty_probs(p, z0);
    const double mg = p.mu_g_eff(), mb = p.mu_b_eff(), l = p.lambda;
    const double drain = p.mu_hat() - l;
    if (!(drain > 0.0)) throw model_error("mean_queue: unstable");
    return l / drain + (mg * (mb - l) * pg0 + mb * (mg - l) * pb0 - (mg - l) * (mb - l)) /
                           ((p.alpha + p.beta) * drain);
}

double waiting_time(const TDQueueParams& p, double z0) {
    if (p.lambda == 0.0) throw model_error("waiting_time: undefined for lambda = 0");
    return mean_queue(p, z0) / p.lambda;
}

double attempt_prob(const TDQueueParams& p, double z0) {
    const auto [pg0, pb0] = empty_probs(p, z0);
    return (p.pi_g() - pg0) * (-std::expm1(-p.mu_g)) +
           (p.pi_b() - pb0) * (-std::expm1(-p.mu_b));
}

std::pair<double, double> partial_gf(const TDQueueParams& p, double z0, double z) {
    if (std::fabs(z - 1.0) < 1e-12) return {p.pi_g(), p.pi_b()};
    const auto [pg0, pb0] = empty_probs(p, z0);
    const auto c = cubic_coeffs(p);
    const double g = eval_cubic(c, z);
    if (std::fabs(g) < 1e-13)
        throw model_error("partial_gf: z at a pole of the generating function");
    const double l = p.lambda, mg = p.mu_g_eff(), mb = p.mu_b_eff();
    const double drain = p.mu_hat() - l;
    const double num_g = p.beta * drain * z + pg0 * mg * (1.0 - z) * (l * z - mb);
    const double num_b = p.alpha * drain * z + pb0 * mb * (1.0 - z) * (l * z - mg);
    return {num_g / g, num_b / g};
}

Steady solve_model3(double K, double lambda, double mu_g, double mu_b, double alpha,
                    double beta, double tol, int max_iter) {
    if (!(K >= 1.0)) throw std::invalid_argument("solve_model3: K must be >= 1");
    TDQueueParams p{lambda, mu_g, mu_b, alpha, beta, 1.0};
    p.validate();
    if (!(p.mu_hat() > lambda))
        throw model_error("solve_model3: unstable even at p_succ = 1");

    double ps = 1.0;
    int it = 0;
    double z0 = 0.0;
    for (; it < max_iter; ++it) {
        p.p_succ = ps;
        if (!(p.mu_hat() > lambda)) {
            char buf[120];
            std::snprintf(buf, sizeof buf,
                          "solve_model3: iteration drove the queue unstable at p_succ=%.6f", ps);
            throw model_error(buf);
        }
        z0 = solve_z0(p);
        const double pt = attempt_prob(p, z0);
        const double ps_new = (K <= 1.0) ? 1.0 : std::pow(1.0 - pt, K - 1.0);
        const double delta = ps_new - ps;
        ps += 0.5 * delta; // damped update
        if (std::fabs(delta) < tol) {
            ps = ps_new;
            break;
        }
    }
    if (it >= max_iter) throw model_error("solve_model3: coupled solve did not converge");

    p.p_succ = ps;
    z0 = solve_z0(p);
    const auto [pg0, pb0] = empty_probs(p, z0);
    Steady s;
    s.z0 = z0;
    s.pi_g0 = pg0;
    s.pi_b0 = pb0;
    s.p_succ = ps;
    s.attempt = attempt_prob(p, z0);
    s.mean_queue = mean_queue(p, z0);
    s.wait = lambda > 0.0 ? s.mean_queue / lambda : 0.0;
    s.iterations = it + 1;
    return s;
}

} // namespace gesched::qmodel3

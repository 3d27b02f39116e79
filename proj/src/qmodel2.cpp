#include "gesched/qmodel2.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/mathx.hpp"

namespace gesched::qmodel2 {

double p_coll_backlogged(double K) {
    if (!(K >= 1.0)) throw std::invalid_argument("p_coll_backlogged: K must be >= 1");
    return -std::expm1((K - 1.0) * std::log1p(-1.0 / K));
}

// Substituting y = lambda / (tau (1 - p)) turns the fixed-point equation into
// y e^-y = lambda/tau (resp. y (1 - y/K)^(K-1) = lambda/tau). The left side
// increases on [0, 1] up to its maximum at y = 1, so the stable root is the
// one in [0, 1]; it exists iff lambda/tau does not exceed that maximum.
double solve_p_coll(double lambda, double tau, std::optional<double> K) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("solve_p_coll: lambda must be >= 0");
    if (!(tau > 0.0)) throw std::invalid_argument("solve_p_coll: tau must be > 0");
    if (K && !(*K >= 2.0)) throw std::invalid_argument("solve_p_coll: K must be >= 2");
    if (lambda == 0.0) return 0.0;
    const double rho = lambda / tau;
    auto lhs = [&](double y) {
        if (!K) return y * std::exp(-y);
        return y * std::exp((*K - 1.0) * std::log1p(-y / *K));
    };
    const double max_lhs = lhs(1.0);
    if (rho > max_lhs)
        throw model_error("solve_p_coll: overloaded, no stable collision fixed point");
    const double y = mathx::brent([&](double v) { return lhs(v) - rho; }, 0.0, 1.0, 0.0, 0.0, 400);
    // p = 1 - lambda / (tau y)
    double p = 1.0 - rho / y;
    if (p < 0.0) p = 0.0;
    return p;
}

double empty_prob(double lambda, double tau, double p_coll) {
    const double mu_eff = (1.0 - p_coll) * tau;
    if (!(mu_eff > lambda)) throw model_error("empty_prob: unstable, lambda >= (1-p_coll) tau");
    return 1.0 - lambda / mu_eff;
}

Metrics metrics_model2(double lambda, double tau, std::optional<double> K) {
    Metrics m{};
    m.p_coll = solve_p_coll(lambda, tau, K);
    m.p_succ = 1.0 - m.p_coll;
    const double mu_eff = m.p_succ * tau;
    if (!(mu_eff > lambda)) throw model_error("metrics_model2: unstable configuration");
    m.service_time = 1.0 / mu_eff;
    m.sojourn = 1.0 / (mu_eff - lambda);
    m.wait = m.sojourn - m.service_time;
    m.queue_len = lambda * m.sojourn;
    return m;
}

} // namespace gesched::qmodel2

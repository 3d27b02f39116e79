#include "gesched/groups.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/evt.hpp"
#include "gesched/mathx.hpp"

namespace gesched::groups {

namespace {

double lchoose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// p^k with the 0^0 = 1 convention, in log space alongside a zero flag.
struct LogPow {
    double logv = 0.0;
    bool zero = false;
    void mul_pow(double p, int k) {
        if (k == 0) return;
        if (p <= 0.0) { zero = true; return; }
        logv += k * std::log(p);
    }
};

} // namespace

SystemChain transition_matrix(int K, double alpha, double beta) {
    if (K < 1) throw std::invalid_argument("transition_matrix: K must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("transition_matrix: alpha, beta must lie in [0, 1]");
    SystemChain c{K, alpha, beta, Eigen::MatrixXd::Zero(K + 1, K + 1)};
    for (int i = 0; i <= K; ++i) {
        for (int j = 0; j <= K; ++j) {
            const int nmax = std::min(std::min(i, K - i), std::min(j, K - j));
            double pij = 0.0;
            for (int n = 0; n <= nmax; ++n) {
                // n users move Bad->Good; the Good->Bad count follows from j-i
                LogPow t;
                if (i <= j) {
                    t.logv = lchoose(K - i, j - i + n) + lchoose(i, n);
                    t.mul_pow(alpha, j - i + n);
                    t.mul_pow(1.0 - alpha, K - j - n);
                    t.mul_pow(beta, n);
                    t.mul_pow(1.0 - beta, i - n);
                } else {
                    t.logv = lchoose(K - i, n) + lchoose(i, i - j + n);
                    t.mul_pow(alpha, n);
                    t.mul_pow(1.0 - alpha, K - i - n);
                    t.mul_pow(beta, i - j + n);
                    t.mul_pow(1.0 - beta, j - n);
                }
                if (!t.zero) pij += std::exp(t.logv);
            }
            c.P(i, j) = pij;
        }
    }
    return c;
}

Eigen::VectorXd stationary_chain(const SystemChain& chain) {
    const int n = chain.K + 1;
    if (chain.alpha + chain.beta <= 0.0)
        throw model_error("stationary_chain: alpha = beta = 0, stationary vector not unique");
    if (chain.alpha >= 1.0 && chain.beta >= 1.0)
        throw model_error("stationary_chain: alpha = beta = 1 gives a reducible flip chain");
    if (n <= 2001) {
        Eigen::MatrixXd A = chain.P.transpose() - Eigen::MatrixXd::Identity(n, n);
        A.row(n - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        b(n - 1) = 1.0;
        Eigen::VectorXd pi = A.partialPivLu().solve(b);
        // clean tiny negative round-off and renormalize
        for (int i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
        pi /= pi.sum();
        return pi;
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd next = chain.P.transpose() * pi;
        next /= next.sum();
        const double diff = (next - pi).lpNorm<1>();
        pi = next;
        if (diff < 1e-15) break;
    }
    return pi;
}

namespace {

struct GroupFactor {
    // CDF and density of one group's maximum, exact-power or Gumbel branch.
    int k;
    double mu, sigma;
    bool use_evt;
    evt::GumbelNorm norm{};

    double cdf(double x) const {
        if (k == 0) return 1.0;
        if (use_evt) return evt::gumbel_cdf(x, norm);
        return std::pow(mathx::norm_cdf((x - mu) / sigma), k);
    }
    double pdf(double x) const {
        if (k == 0) return 0.0;
        if (use_evt) return evt::gumbel_pdf(x, norm);
        const double z = (x - mu) / sigma;
        const double F = mathx::norm_cdf(z);
        return k * std::pow(F, k - 1) * mathx::norm_pdf(z) / sigma;
    }
};

GroupFactor make_factor(int k, double mu, double sigma, int phi) {
    GroupFactor f{k, mu, sigma, k > phi, {}};
    if (f.use_evt) f.norm = evt::norm_constants_gaussian(double(k), mu, sigma);
    return f;
}

void check_groups(int k_bad, int k_good, int phi) {
    if (k_bad < 0 || k_good < 0 || k_bad + k_good < 1)
        throw std::invalid_argument("two_group_max: need k_bad + k_good >= 1");
    if (phi < 3) throw std::invalid_argument("two_group_max: phi must be >= 3");
}

} // namespace

double two_group_max_cdf(double x, int k_bad, int k_good,
                         const channel::ChannelModel& m, int phi) {
    check_groups(k_bad, k_good, phi);
    const auto fb = make_factor(k_bad, m.mu_b, m.sigma_b, phi);
    const auto fg = make_factor(k_good, m.mu_g, m.sigma_g, phi);
    return fb.cdf(x) * fg.cdf(x);
}

double two_group_max_pdf(double x, int k_bad, int k_good,
                         const channel::ChannelModel& m, int phi) {
    check_groups(k_bad, k_good, phi);
    const auto fb = make_factor(k_bad, m.mu_b, m.sigma_b, phi);
    const auto fg = make_factor(k_good, m.mu_g, m.sigma_g, phi);
    return fb.pdf(x) * fg.cdf(x) + fb.cdf(x) * fg.pdf(x);
}

double expected_capacity_by_state(int K, const channel::ChannelModel& m, int phi) {
    if (K < 1) throw std::invalid_argument("expected_capacity_by_state: K must be >= 1");
    const auto chain = transition_matrix(K, m.alpha, m.beta);
    const auto pi = stationary_chain(chain);

    // integration window covering both groups' maxima
    double upper_g = m.mu_g + 12.0 * m.sigma_g;
    double upper_b = m.mu_b + 12.0 * m.sigma_b;
    if (K >= 3) {
        const auto ng = evt::norm_constants_gaussian(double(K), m.mu_g, m.sigma_g);
        const auto nb = evt::norm_constants_gaussian(double(K), m.mu_b, m.sigma_b);
        upper_g = ng.b_K + 12.0 / ng.a_K;
        upper_b = nb.b_K + 12.0 / nb.a_K;
    }
    const double lo = std::fmin(m.mu_b - 10.0 * m.sigma_b, m.mu_g - 10.0 * m.sigma_g);
    const double hi = std::fmax(upper_g, upper_b);

    double total = 0.0;
    for (int i = 0; i <= K; ++i) {
        if (pi(i) <= 0.0) continue;
        const double e_i = mathx::integrate(
            [&](double x) { return x * two_group_max_pdf(x, i, K - i, m, phi); }, lo, hi, 1e-8);
        total += pi(i) * e_i;
    }
    return total;
}

namespace {

void check_symmetric_even(int K, const channel::ChannelModel& m, int min_half) {
    if (m.alpha != m.beta)
        throw std::invalid_argument(
            "capacity bound: derived only for the symmetric case alpha == beta");
    if (K % 2 != 0) throw std::invalid_argument("capacity bound: K must be even");
    if (K / 2 < min_half)
        throw std::invalid_argument("capacity bound: group size below EVT minimum (3)");
}

} // namespace

double capacity_lower_bound_mode(int K, const channel::ChannelModel& m) {
    check_symmetric_even(K, m, 3);
    const auto pi = stationary_chain(transition_matrix(K, m.alpha, m.beta));
    const auto n = evt::norm_constants_gaussian(K / 2.0, m.mu_g, m.sigma_g);
    return 2.0 * pi(K / 2) * evt::gumbel_mean(n);
}

DeltaBound capacity_lower_bound_delta(int K, const channel::ChannelModel& m, int delta) {
    if (delta < 0) throw std::invalid_argument("capacity_lower_bound_delta: delta < 0");
    check_symmetric_even(K, m, 3 + delta);
    const auto pi = stationary_chain(transition_matrix(K, m.alpha, m.beta));
    DeltaBound out{0.0, 0.0};
    for (int i = K / 2 - delta; i <= K / 2; ++i) {
        const auto n = evt::norm_constants_gaussian(double(i), m.mu_g, m.sigma_g);
        out.sum += evt::gumbel_mean(n) * pi(i);
    }
    const auto n0 = evt::norm_constants_gaussian(K / 2.0 - delta, m.mu_g, m.sigma_g);
    out.final_display = evt::gumbel_mean(n0) * pi(K / 2 - delta) * delta;
    return out;
}

} // namespace gesched::groups

#include "gesched/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gesched::stats {

namespace {

// Lower incomplete gamma by series, upper by continued fraction (Lentz).
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * k, 0.5 * x);
}

GofResult chi2_test(const std::vector<double>& observed,
                    const std::vector<double>& expected,
                    double significance, double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2_test: size mismatch");
    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    GofResult r;
    r.dof = int(exp.size()) - 1;
    if (r.dof < 1) {
        r.pass = true;
        return r;
    }
    for (std::size_t i = 0; i < exp.size(); ++i) {
        const double d = obs[i] - exp[i];
        r.statistic += d * d / exp[i];
    }
    r.p_value = chi2_sf(r.statistic, double(r.dof));
    r.pass = r.p_value > significance;
    return r;
}

double ks_statistic(const std::vector<double>& cdf_at_sorted) {
    const std::size_t n = cdf_at_sorted.size();
    if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = cdf_at_sorted[i];
        d = std::max(d, fi - double(i) / double(n));
        d = std::max(d, double(i + 1) / double(n) - fi);
    }
    return d;
}

double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(double(n));
    const double t = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * t * t);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double poisson_pmf(unsigned k, double mean) {
    if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-mean + double(k) * std::log(mean) - std::lgamma(double(k) + 1.0));
}

} // namespace gesched::stats

#include "gesched/dsched.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/mathx.hpp"

namespace gesched::dsched {

const char* method_name(ThresholdMethod m) {
    switch (m) {
        case ThresholdMethod::AsymptoticMixture: return "asymptotic_mixture";
        case ThresholdMethod::ExactMixture: return "exact_mixture";
        case ThresholdMethod::RefinedGaussian: return "refined_gaussian";
    }
    return "?";
}

ThresholdPlan threshold_asymptotic(double K, const channel::ChannelModel& m) {
    const auto n = evt::norm_constants_mixture(K, m);
    return {n.b_K, K, 1.0 / K, ThresholdMethod::AsymptoticMixture};
}

ThresholdPlan threshold_exact(double K, const channel::ChannelModel& m) {
    if (!(K >= 2.0)) throw std::invalid_argument("threshold_exact: K must be >= 2");
    const double u = channel::mixture_quantile(1.0 - 1.0 / K, m);
    return {u, K, 1.0 / K, ThresholdMethod::ExactMixture};
}

ThresholdPlan threshold_refined_gaussian(double K, double mu, double sigma) {
    if (!(K >= 2.0)) throw std::invalid_argument("threshold_refined_gaussian: K must be >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("threshold_refined_gaussian: sigma <= 0");
    const double u = mu + std::sqrt(2.0) * sigma * mathx::erfc_inv(2.0 / K);
    return {u, K, 1.0 / K, ThresholdMethod::RefinedGaussian};
}

double utilization_prob(double K) {
    if (!(K >= 1.0)) throw std::invalid_argument("utilization_prob: K must be >= 1");
    if (K == 1.0) return 1.0;
    return std::exp((K - 1.0) * std::log1p(-1.0 / K));
}

DistributedCapacity expected_capacity_distributed(double K, const channel::ChannelModel& m) {
    const auto n = evt::norm_constants_mixture(K, m);
    DistributedCapacity out;
    out.threshold = n.b_K;
    out.conditional_mean = n.b_K + 1.0 / n.a_K;
    out.utilization_asymptotic = std::exp(-1.0);
    out.utilization_finite_k = utilization_prob(K);
    out.value = out.utilization_asymptotic * out.conditional_mean;
    return out;
}

double level_for_rate(double tau, double n, double mu, double sigma) {
    if (!(tau > 0.0)) throw std::invalid_argument("level_for_rate: tau must be positive");
    const auto c = evt::norm_constants_gaussian(n, mu, sigma);
    return std::log(1.0 / tau) / c.a_K + c.b_K;
}

} // namespace gesched::dsched

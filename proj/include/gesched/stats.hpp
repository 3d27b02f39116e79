#pragma once

#include <cstddef>
#include <vector>

namespace gesched::stats {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Chi-square survival function P(X > x) with k degrees of freedom.
double chi2_sf(double x, double k);

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
    bool pass = false;
};

// Pearson chi-square goodness of fit. Cells with expected count below
// `min_expected` are merged into their right neighbour (tail pooling).
GofResult chi2_test(const std::vector<double>& observed,
                    const std::vector<double>& expected,
                    double significance, double min_expected = 5.0);

// One-sample Kolmogorov-Smirnov against a fully specified continuous CDF.
// cdf_at_sorted must hold F(x_(i)) for the sorted sample.
double ks_statistic(const std::vector<double>& cdf_at_sorted);

// Asymptotic KS p-value (Kolmogorov distribution).
double ks_p_value(double d, std::size_t n);

// Poisson pmf without overflow for moderate k.
double poisson_pmf(unsigned k, double mean);

} // namespace gesched::stats

#pragma once

#include <functional>

namespace gesched::mathx {

inline constexpr double kEulerGamma = 0.5772156649015329;

// Standard normal density / CDF / survival, evaluated through erfc so the
// tails keep full relative accuracy.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_sf(double x);

// Inverse complementary error function, |rel err| <= 1e-14 over (0, 2).
// Polynomial initial guess polished by one Newton step on erfc.
double erfc_inv(double y);

// Inverse standard normal CDF with the same polish.
double norm_quantile(double p);

// Brent root bracketing solver. f(a) and f(b) must have opposite signs.
double brent(const std::function<double(double)>& f, double a, double b,
             double xtol, double ftol, int max_iter = 200);

// Adaptive Simpson quadrature to an absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

} // namespace gesched::mathx

#include "gesched/mathx.hpp"

#include <cmath>
#include <stdexcept>

#include "gesched/errors.hpp"
#include "gesched/kernels.hpp"

namespace gesched::mathx {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
} // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) {
        if (y == 0.0 || y == 2.0)
            throw std::domain_error("erfc_inv: argument at endpoint has infinite value");
        throw std::domain_error("erfc_inv: argument outside (0, 2)");
    }
    const double p = 0.5 * y; // erfc_inv(y) = -ndtri(y/2)/sqrt(2)
    double x;
    if (p >= 0x1p-54) {
        x = -kern::ndtri(p) / kSqrt2;
    } else {
        // asymptotic start: x^2 ~= r2 - log(pi*x^2)/... iterate twice
        const double r2 = -std::log(p);
        double x2 = r2 - 0.5 * std::log(3.141592653589793 * r2);
        x2 = r2 - 0.5 * std::log(3.141592653589793 * x2);
        x = std::sqrt(x2);
    }
    // Newton on f(x) = erfc(x) - y, f'(x) = -2/sqrt(pi) exp(-x^2)
    for (int i = 0; i < 2; ++i) {
        const double f = std::erfc(x) - y;
        const double d = -1.1283791670955126 * std::exp(-x * x);
        if (d == 0.0) break;
        x -= f / d;
    }
    return x;
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p outside (0, 1)");
    return -kSqrt2 * erfc_inv(2.0 * p);
}

double brent(const std::function<double(double)>& f, double a, double b,
             double xtol, double ftol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw model_error("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 2.22e-16 * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || std::fabs(fb) <= ftol) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double m, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw model_error("integrate: max recursion depth reached");
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

} // namespace gesched::mathx

#include <cmath>
#include <cstring>

#include "gesched/kernels.hpp"

namespace gesched::kern {
namespace {

// Scalar lane type implementing the Vec contract of kernel_algos.hpp.
struct S1 {
    double v;
    using mask = bool;
    static S1 broadcast(double x) { return {x}; }
    friend S1 operator+(S1 a, S1 b) { return {a.v + b.v}; }
    friend S1 operator-(S1 a, S1 b) { return {a.v - b.v}; }
    friend S1 operator*(S1 a, S1 b) { return {a.v * b.v}; }
    friend S1 operator/(S1 a, S1 b) { return {a.v / b.v}; }
    friend S1 fma(S1 a, S1 b, S1 c) { return {std::fma(a.v, b.v, c.v)}; }
    friend S1 sqrt(S1 a) { return {std::sqrt(a.v)}; }
    friend S1 abs(S1 a) { return {std::fabs(a.v)}; }
    friend mask lt(S1 a, S1 b) { return a.v < b.v; }
    friend mask le(S1 a, S1 b) { return a.v <= b.v; }
    friend S1 select(mask m, S1 a, S1 b) { return m ? a : b; }
};

constexpr double kSqrt2Mid = 1.4142135623730951; // split point for mantissa reduction

inline void reduce_exponent(S1 x, S1& m, S1& e) {
    uint64_t bits;
    std::memcpy(&bits, &x.v, 8);
    int ex = int(bits >> 52) - 1023;
    bits = (bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull;
    double mm;
    std::memcpy(&mm, &bits, 8);
    if (mm >= kSqrt2Mid) {
        mm *= 0.5;
        ex += 1;
    }
    m = {mm};
    e = {double(ex)};
}

} // namespace
} // namespace gesched::kern

#include "kernel_algos.hpp"

namespace gesched::kern {
namespace {

void uniforms_scalar(rng::Key key, uint32_t slot, uint32_t purpose, int n, double* out) {
    for (int b = 0; 2 * b < n; ++b) {
        const auto y = rng::philox4x32(rng::Counter{uint32_t(b), slot, purpose, 0}, key);
        out[2 * b] = rng::u01_from_bits(y[0], y[1]);
        if (2 * b + 1 < n) out[2 * b + 1] = rng::u01_from_bits(y[2], y[3]);
    }
}

void ndtri_scalar(const double* u, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = detail::ndtri_core(S1{u[i]}).v;
}

void log_scalar(const double* x, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = detail::log_core(S1{x[i]}).v;
}

void gaussians_scalar(const double* u, const uint8_t* state, double mu_g, double sigma_g,
                      double mu_b, double sigma_b, double* out, int n) {
    for (int i = 0; i < n; ++i)
        out[i] = detail::gaussian_core(S1{u[i]}, state[i] == 0, mu_g, sigma_g, mu_b, sigma_b).v;
}

void step_states_scalar(const double* u, uint8_t* state, double alpha, double beta, int n) {
    for (int i = 0; i < n; ++i) {
        if (state[i] == 0)
            state[i] = (u[i] < alpha) ? 1 : 0;
        else
            state[i] = (u[i] < beta) ? 0 : 1;
    }
}

} // namespace

const BatchOps& scalar_ops() {
    static const BatchOps ops{uniforms_scalar, ndtri_scalar, log_scalar,
                              gaussians_scalar, step_states_scalar, "scalar"};
    return ops;
}

double ndtri(double u) { return detail::ndtri_core(S1{u}).v; }
double log_det(double x) { return detail::log_core(S1{x}).v; }

} // namespace gesched::kern

#pragma once

#include <cstddef>
#include <cstdint>

#include "gesched/rng.hpp"

namespace gesched::kern {

// Batch kernels for the simulator's inner loops. Two implementations exist:
// a scalar reference and an AVX2 variant. Both evaluate the exact same
// arithmetic sequence (explicit FMA, fixed-order polynomials), so their
// outputs are bit-identical; the unit tests assert this. Selection happens
// once at startup from CPUID, overridable with GESCHED_FORCE_SCALAR=1 or
// force_backend().

enum class Backend { Scalar, Avx2 };

struct BatchOps {
    // out[i] = addressed uniform for user i at (slot, purpose).
    void (*uniforms)(rng::Key key, uint32_t slot, uint32_t purpose, int n, double* out);
    // out[i] = ndtri(u[i]), inverse standard normal CDF (max rel err ~8e-15).
    void (*ndtri)(const double* u, double* out, int n);
    // out[i] = log(x[i]) for normal positive finite x.
    void (*log)(const double* x, double* out, int n);
    // out[i] = mu[state[i]] + sigma[state[i]] * ndtri(u[i]); state 0=Good, 1=Bad.
    void (*gaussians)(const double* u, const uint8_t* state, double mu_g, double sigma_g,
                      double mu_b, double sigma_b, double* out, int n);
    // state[i] <- stepped by the two-state chain: Good->Bad w.p. alpha,
    // Bad->Good w.p. beta, decided by u[i].
    void (*step_states)(const double* u, uint8_t* state, double alpha, double beta, int n);
    const char* name;
};

const BatchOps& scalar_ops();
#if defined(GESCHED_HAVE_AVX2)
const BatchOps& avx2_ops();
#endif

// Currently selected backend (CPUID + env override on first use).
const BatchOps& ops();
Backend active_backend();
void force_backend(Backend b); // for tests

// Scalar single-value entry points (always the reference arithmetic).
double ndtri(double u);
double log_det(double x);

} // namespace gesched::kern

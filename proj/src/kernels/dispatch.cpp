#include <cstdlib>

#include "gesched/kernels.hpp"

namespace gesched::kern {

namespace {

Backend g_backend = [] {
#if defined(GESCHED_HAVE_AVX2)
    const char* force = std::getenv("GESCHED_FORCE_SCALAR");
    if (force != nullptr && force[0] == '1') return Backend::Scalar;
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Backend::Avx2;
#endif
    return Backend::Scalar;
}();

} // namespace

const BatchOps& ops() {
#if defined(GESCHED_HAVE_AVX2)
    if (g_backend == Backend::Avx2) return avx2_ops();
#endif
    return scalar_ops();
}

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
#if !defined(GESCHED_HAVE_AVX2)
    b = Backend::Scalar;
#endif
    g_backend = b;
}

} // namespace gesched::kern

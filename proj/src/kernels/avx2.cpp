#if defined(GESCHED_HAVE_AVX2)

#include <immintrin.h>

#include <cstring>

#include "gesched/kernels.hpp"

namespace gesched::kern {
namespace {

struct V4 {
    __m256d v;
    using mask = __m256d;
    static V4 broadcast(double x) { return {_mm256_set1_pd(x)}; }
    friend V4 operator+(V4 a, V4 b) { return {_mm256_add_pd(a.v, b.v)}; }
    friend V4 operator-(V4 a, V4 b) { return {_mm256_sub_pd(a.v, b.v)}; }
    friend V4 operator*(V4 a, V4 b) { return {_mm256_mul_pd(a.v, b.v)}; }
    friend V4 operator/(V4 a, V4 b) { return {_mm256_div_pd(a.v, b.v)}; }
    friend V4 fma(V4 a, V4 b, V4 c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }
    friend V4 sqrt(V4 a) { return {_mm256_sqrt_pd(a.v)}; }
    friend V4 abs(V4 a) {
        const __m256d m = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
        return {_mm256_and_pd(a.v, m)};
    }
    friend mask lt(V4 a, V4 b) { return _mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ); }
    friend mask le(V4 a, V4 b) { return _mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ); }
    friend V4 select(mask m, V4 a, V4 b) { return {_mm256_blendv_pd(b.v, a.v, m)}; }
};

inline void reduce_exponent(V4 x, V4& m, V4& e) {
    const __m256i bits = _mm256_castpd_si256(x.v);
    __m256i ex64 = _mm256_srli_epi64(bits, 52);
    ex64 = _mm256_sub_epi64(ex64, _mm256_set1_epi64x(1023));
    // each 64-bit exponent fits in 32 bits; compress to the low 128 lane
    const __m256i idx = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);
    const __m128i ex32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(ex64, idx));
    __m256d ed = _mm256_cvtepi32_pd(ex32);

    const __m256i mant = _mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
        _mm256_set1_epi64x(0x3FF0000000000000ll));
    __m256d md = _mm256_castsi256_pd(mant);
    const __m256d big = _mm256_cmp_pd(md, _mm256_set1_pd(1.4142135623730951), _CMP_GE_OQ);
    md = _mm256_blendv_pd(md, _mm256_mul_pd(md, _mm256_set1_pd(0.5)), big);
    ed = _mm256_blendv_pd(ed, _mm256_add_pd(ed, _mm256_set1_pd(1.0)), big);
    m = {md};
    e = {ed};
}

} // namespace
} // namespace gesched::kern

#include "kernel_algos.hpp"

namespace gesched::kern {
namespace {

// ---- philox4x32, 8 blocks per call -------------------------------------

struct P8 {
    __m256i x0, x1, x2, x3;
};

inline __m256i mullo32(__m256i a, uint32_t m) {
    return _mm256_mullo_epi32(a, _mm256_set1_epi32(int(m)));
}

inline __m256i mulhi32(__m256i a, uint32_t m) {
    const __m256i mm = _mm256_set1_epi32(int(m));
    const __m256i pe = _mm256_mul_epu32(a, mm);                          // lanes 0,2,4,6
    const __m256i po = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mm);   // lanes 1,3,5,7
    const __m256i hi_mask = _mm256_set1_epi64x(int64_t(0xFFFFFFFF00000000ull));
    return _mm256_or_si256(_mm256_srli_epi64(pe, 32), _mm256_and_si256(po, hi_mask));
}

inline void philox_round(P8& s, __m256i k0, __m256i k1) {
    const __m256i hi0 = mulhi32(s.x0, 0xD2511F53u);
    const __m256i lo0 = mullo32(s.x0, 0xD2511F53u);
    const __m256i hi1 = mulhi32(s.x2, 0xCD9E8D57u);
    const __m256i lo1 = mullo32(s.x2, 0xCD9E8D57u);
    const __m256i nx0 = _mm256_xor_si256(_mm256_xor_si256(hi1, s.x1), k0);
    const __m256i nx2 = _mm256_xor_si256(_mm256_xor_si256(hi0, s.x3), k1);
    s.x0 = nx0;
    s.x1 = lo1;
    s.x2 = nx2;
    s.x3 = lo0;
}

inline P8 philox8(uint32_t block0, uint32_t slot, uint32_t purpose, rng::Key key) {
    P8 s;
    s.x0 = _mm256_add_epi32(_mm256_set1_epi32(int(block0)),
                            _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));
    s.x1 = _mm256_set1_epi32(int(slot));
    s.x2 = _mm256_set1_epi32(int(purpose));
    s.x3 = _mm256_setzero_si256();
    __m256i k0 = _mm256_set1_epi32(int(key.k0));
    __m256i k1 = _mm256_set1_epi32(int(key.k1));
    for (int r = 0; r < 10; ++r) {
        philox_round(s, k0, k1);
        k0 = _mm256_add_epi32(k0, _mm256_set1_epi32(int(0x9E3779B9u)));
        k1 = _mm256_add_epi32(k1, _mm256_set1_epi32(int(0xBB67AE85u)));
    }
    return s;
}

// (hi32, lo32) pairs -> uniform doubles, u = (top52 + 1/2) * 2^-52
inline __m256d u01_from_words(__m256i hi, __m256i lo) {
    // assemble four u64 from the low halves of four 64-bit lanes of hi/lo
    const __m256i hi64 = _mm256_slli_epi64(hi, 32);
    const __m256i lo64 = _mm256_and_si256(lo, _mm256_set1_epi64x(0xFFFFFFFFll));
    __m256i k = _mm256_srli_epi64(_mm256_or_si256(hi64, lo64), 12);
    // exact u64 (< 2^52) -> double via exponent injection
    k = _mm256_or_si256(k, _mm256_set1_epi64x(0x4330000000000000ll));
    const __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(k), _mm256_set1_pd(0x1p52));
    return _mm256_fmadd_pd(d, _mm256_set1_pd(0x1p-52), _mm256_set1_pd(0x1p-53));
}

inline __m256i even_words(__m256i a, __m256i b) {
    // lanes {a0,a2,a4,a6,b0,b2,b4,b6} packed as 8 x u32 (a in low 128, b in high)
    const __m256i idx = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
    const __m256i pa = _mm256_permutevar8x32_epi32(a, idx);
    const __m256i pb = _mm256_permutevar8x32_epi32(b, idx);
    return _mm256_permute2x128_si256(pa, pb, 0x20);
}

void uniforms_avx2(rng::Key key, uint32_t slot, uint32_t purpose, int n, double* out) {
    int b = 0;
    const int nblocks = (n + 1) / 2;
    for (; b + 8 <= nblocks; b += 8) {
        const P8 s = philox8(uint32_t(b), slot, purpose, key);
        // per block: d0 from (y0,y1), d1 from (y2,y3)
        alignas(32) double d0[8], d1[8];
        // even u64 lanes hold blocks b,b+2,b+4,b+6 ... work in two halves
        const __m256i y0e = _mm256_srli_epi64(_mm256_slli_epi64(s.x0, 32), 32);
        const __m256i y0o = _mm256_srli_epi64(s.x0, 32);
        const __m256i y1e = _mm256_srli_epi64(_mm256_slli_epi64(s.x1, 32), 32);
        const __m256i y1o = _mm256_srli_epi64(s.x1, 32);
        const __m256i y2e = _mm256_srli_epi64(_mm256_slli_epi64(s.x2, 32), 32);
        const __m256i y2o = _mm256_srli_epi64(s.x2, 32);
        const __m256i y3e = _mm256_srli_epi64(_mm256_slli_epi64(s.x3, 32), 32);
        const __m256i y3o = _mm256_srli_epi64(s.x3, 32);
        const __m256d d0e = u01_from_words(y0e, y1e); // blocks b,b+2,b+4,b+6
        const __m256d d0o = u01_from_words(y0o, y1o); // blocks b+1,b+3,b+5,b+7
        const __m256d d1e = u01_from_words(y2e, y3e);
        const __m256d d1o = u01_from_words(y2o, y3o);
        alignas(32) double t0e[4], t0o[4], t1e[4], t1o[4];
        _mm256_store_pd(t0e, d0e);
        _mm256_store_pd(t0o, d0o);
        _mm256_store_pd(t1e, d1e);
        _mm256_store_pd(t1o, d1o);
        for (int j = 0; j < 4; ++j) {
            d0[2 * j] = t0e[j];
            d0[2 * j + 1] = t0o[j];
            d1[2 * j] = t1e[j];
            d1[2 * j + 1] = t1o[j];
        }
        for (int j = 0; j < 8; ++j) {
            const int u0 = 2 * (b + j);
            out[u0] = d0[j];
            if (u0 + 1 < n) out[u0 + 1] = d1[j];
        }
    }
    for (; b < nblocks; ++b) {
        const auto y = rng::philox4x32(rng::Counter{uint32_t(b), slot, purpose, 0}, key);
        out[2 * b] = rng::u01_from_bits(y[0], y[1]);
        if (2 * b + 1 < n) out[2 * b + 1] = rng::u01_from_bits(y[2], y[3]);
    }
}

void ndtri_avx2(const double* u, double* out, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const V4 x{_mm256_loadu_pd(u + i)};
        _mm256_storeu_pd(out + i, detail::ndtri_core(x).v);
    }
    for (; i < n; ++i) out[i] = ndtri(u[i]);
}

void log_avx2(const double* x, double* out, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const V4 v{_mm256_loadu_pd(x + i)};
        _mm256_storeu_pd(out + i, detail::log_core(v).v);
    }
    for (; i < n; ++i) out[i] = log_det(x[i]);
}

inline __m256d good_mask4(const uint8_t* state) {
    uint32_t packed;
    std::memcpy(&packed, state, 4);
    const __m128i b = _mm_cvtsi32_si128(int(packed));
    const __m128i w = _mm_cvtepu8_epi32(b);
    const __m128i eq = _mm_cmpeq_epi32(w, _mm_setzero_si128());
    return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(eq));
}

void gaussians_avx2(const double* u, const uint8_t* state, double mu_g, double sigma_g,
                    double mu_b, double sigma_b, double* out, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const V4 uu{_mm256_loadu_pd(u + i)};
        const __m256d good = good_mask4(state + i);
        _mm256_storeu_pd(out + i,
                         detail::gaussian_core(uu, good, mu_g, sigma_g, mu_b, sigma_b).v);
    }
    for (; i < n; ++i) {
        const double x = ndtri(u[i]);
        out[i] = state[i] == 0 ? std::fma(sigma_g, x, mu_g) : std::fma(sigma_b, x, mu_b);
    }
}

void step_states_avx2(const double* u, uint8_t* state, double alpha, double beta, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d uu = _mm256_loadu_pd(u + i);
        const int ma = _mm256_movemask_pd(_mm256_cmp_pd(uu, _mm256_set1_pd(alpha), _CMP_LT_OQ));
        const int mb = _mm256_movemask_pd(_mm256_cmp_pd(uu, _mm256_set1_pd(beta), _CMP_LT_OQ));
        for (int j = 0; j < 4; ++j) {
            if (state[i + j] == 0)
                state[i + j] = (ma >> j) & 1;
            else
                state[i + j] = ((mb >> j) & 1) ? 0 : 1;
        }
    }
    for (; i < n; ++i) {
        if (state[i] == 0)
            state[i] = (u[i] < alpha) ? 1 : 0;
        else
            state[i] = (u[i] < beta) ? 0 : 1;
    }
}

} // namespace

const BatchOps& avx2_ops() {
    static const BatchOps ops{uniforms_avx2, ndtri_avx2, log_avx2,
                              gaussians_avx2, step_states_avx2, "avx2"};
    return ops;
}

} // namespace gesched::kern

#endif // GESCHED_HAVE_AVX2

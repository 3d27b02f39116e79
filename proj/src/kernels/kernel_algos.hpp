#pragma once

// Lane-generic arithmetic shared by the scalar and AVX2 backends. Every
// operation here maps to a single IEEE-754 instruction (add/sub/mul/div/
// sqrt/fma/compare/select), so instantiating the same template with the
// scalar lane type and the AVX2 lane type yields bit-identical results.
//
// Requirements on V:
//   V::broadcast(double), arithmetic operators, fma(a,b,c), sqrt(a),
//   min/max, comparisons returning V::mask, select(mask, a, b),
//   reduce_exponent(x, m, e)  -- split x = m * 2^e with m in [sqrt(1/2), sqrt(2))
//   V::mask logical ops.

namespace gesched::kern::detail {

// log: e*ln2 + 2s*P(s^2), s = (m-1)/(m+1). Series coefficients are the exact
// atanh expansion 1/(2k+1); with m in [sqrt(1/2), sqrt(2)), s^2 <= 0.0295 and
// the truncation error is below 3e-17 relative.
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kAtanhCoef[] = {
    1.0,
    1.0 / 3.0,
    1.0 / 5.0,
    1.0 / 7.0,
    1.0 / 9.0,
    1.0 / 11.0,
    1.0 / 13.0,
    1.0 / 15.0,
    1.0 / 17.0,
    1.0 / 19.0,
    1.0 / 21.0,
};

template <class V, std::size_t N>
inline V horner(const double (&c)[N], V t) {
    V acc = V::broadcast(c[N - 1]);
    for (std::size_t i = N - 1; i-- > 0;) acc = fma(acc, t, V::broadcast(c[i]));
    return acc;
}

template <class V>
inline V log_core(V x) {
    V m;
    V e;
    reduce_exponent(x, m, e); // m in [sqrt(1/2), sqrt(2)), x = m * 2^e
    const V one = V::broadcast(1.0);
    const V s = (m - one) / (m + one);
    const V z = s * s;
    const V p = horner<V>(kAtanhCoef, z);
    const V lnm = (s + s) * p;
    V r = fma(e, V::broadcast(kLn2Lo), lnm);
    r = fma(e, V::broadcast(kLn2Hi), r);
    return r;
}

// Inverse standard normal CDF. Central branch |u-1/2| <= 0.425 uses a 7/7
// rational in w = q^2; the tails use Chebyshev-fitted polynomials in
// r = sqrt(-log(min(u,1-u))). Max relative error ~8e-15 for u in
// [2^-54, 1-2^-54], which is the full range of the uniform generator.
inline constexpr double kCentralP[] = {
    2.80673624990564095,
    -5.533098999866994115,
    4.299731902550424791,
    -1.664704171650038592,
    0.3331337915779721734,
    -0.03208819191693868641,
    0.001182473634959613931,
    -7.651226877625841892e-6,
};
inline constexpr double kCentralQ[] = {
    1.0,
    -2.108673169267711541,
    1.779970323919914549,
    -0.7657030661708392129,
    0.1764562427688845634,
    -0.02085540726120231422,
    0.001081755653002781249,
    -1.59384996310352717e-5,
};
inline constexpr double kTail1[] = {
    3.0069678728432924,
    1.6046902617526566,
    -0.044481761010972613,
    0.013611402658531670,
    -0.0043247210714820097,
    0.0014108570570374033,
    -0.00047000284638718095,
    0.00015937992106461781,
    -5.4893706069645188e-5,
    1.9171860397988919e-5,
    -6.7754795402991964e-6,
    2.4085085563555376e-6,
    -8.6784532032182606e-7,
    3.3251284788373329e-7,
    -1.2178291154986260e-7,
    2.9015628060655013e-8,
    -1.0636144891757164e-8,
    1.1842206739433174e-8,
    -4.4374426899979992e-9,
};
inline constexpr double kTail2[] = {
    6.5843747789206445,
    1.9859025529769970,
    -0.016230825313081106,
    0.0036263587143320001,
    -0.00083496755255658576,
    0.00019601784797553939,
    -4.6657073391795501e-5,
    1.1223305585058028e-5,
    -2.7231939984786389e-6,
    6.6651566821202802e-7,
    -1.6399261524261794e-7,
    3.9434926121657403e-8,
    -9.8087497270059232e-9,
    3.2228759082516139e-9,
    -8.1192178209746521e-10,
};

template <class V>
inline V ndtri_core(V u) {
    const V half = V::broadcast(0.5);
    const V q = u - half;
    const V absq = abs(q);
    const V ptail = half - absq; // min(u, 1-u), exact for u in (0,1)

    // central: x = q * P(w)/Q(w), w = q*q, mapped to t = w*(2/0.180625) - 1
    const V w = q * q;
    const V tc = fma(w, V::broadcast(2.0 / 0.180625), V::broadcast(-1.0));
    const V xc = q * (horner<V>(kCentralP, tc) / horner<V>(kCentralQ, tc));

    // tails: r = sqrt(-log(ptail)); fit variable t = (2r-(a+b))/(b-a)
    const V r = sqrt(V::broadcast(0.0) - log_core(ptail));
    const V t1 = fma(r, V::broadcast(2.0 / 2.05), V::broadcast(-5.15 / 2.05));
    const V t2 = fma(r, V::broadcast(2.0 / 2.7), V::broadcast(-9.9 / 2.7));
    const V xt1 = horner<V>(kTail1, t1);
    const V xt2 = horner<V>(kTail2, t2);
    V xt = select(lt(r, V::broadcast(3.6)), xt1, xt2);
    xt = select(lt(q, V::broadcast(0.0)), V::broadcast(0.0) - xt, xt);

    return select(le(absq, V::broadcast(0.425)), xc, xt);
}

template <class V>
inline V gaussian_core(V u, typename V::mask is_good, double mu_g, double sigma_g,
                       double mu_b, double sigma_b) {
    const V x = ndtri_core(u);
    const V mu = select(is_good, V::broadcast(mu_g), V::broadcast(mu_b));
    const V sigma = select(is_good, V::broadcast(sigma_g), V::broadcast(sigma_b));
    return fma(sigma, x, mu);
}

} // namespace gesched::kern::detail

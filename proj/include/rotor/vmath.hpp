// Width-generic elementary functions on packs: sincos and log, accurate to
// about one ulp on the ranges the kernels produce (|x| < 4 pi for sincos
// after the per-step angle reduction, normal positive doubles for log).
// All widths follow the same operation sequence, so lanes are bit-identical
// across scalar, AVX2 and AVX-512 builds.

#pragma once

#include "rotor/pack.hpp"

namespace rotor::simd {

// 1.5 * 2^52: adding it rounds to nearest integer and leaves that integer in
// the low mantissa bits.
inline constexpr double kRoundMagic = 6755399441055744.0;
inline constexpr double kExpMagic = 4503599627370496.0;  // 2^52

// Exact-integer u64 lanes (< 2^52) to double lanes.
template <int W>
inline pack<W> u52_to_double(upack<W> u) {
    const upack<W> magic_bits = upack<W>::broadcast(0x4330000000000000ull);
    return bits_to_double(u | magic_bits) - pack<W>::broadcast(kExpMagic);
}

template <int W>
struct SinCos {
    pack<W> sin, cos;
};

// Cody-Waite reduction by pi/2 followed by Taylor polynomials on [-pi/4,
// pi/4]. The quadrant comes from the low bits of the rounding-magic sum.
template <int W>
inline SinCos<W> sincos(pack<W> x) {
    using P = pack<W>;
    using U = upack<W>;
    const P two_over_pi = P::broadcast(0.63661977236758134308);
    const P magic = P::broadcast(kRoundMagic);
    const P t = fmadd(x, two_over_pi, magic);
    const U qbits = bits_of(t);
    const P n = t - magic;

    P r = fnmadd(n, P::broadcast(1.57079632673412561417e+00), x);
    r = fnmadd(n, P::broadcast(6.07710050650619224932e-11), r);
    r = fnmadd(n, P::broadcast(2.02226624879595063154e-21), r);

    const P r2 = r * r;
    P ps = P::broadcast(1.0 / 1307674368000.0);
    ps = fmadd(ps, r2, P::broadcast(-1.0 / 6227020800.0));
    ps = fmadd(ps, r2, P::broadcast(1.0 / 39916800.0));
    ps = fmadd(ps, r2, P::broadcast(-1.0 / 362880.0));
    ps = fmadd(ps, r2, P::broadcast(1.0 / 5040.0));
    ps = fmadd(ps, r2, P::broadcast(-1.0 / 120.0));
    ps = fmadd(ps, r2, P::broadcast(1.0 / 6.0));
    const P sin_r = fnmadd(ps * r2, r, r);

    P pc = P::broadcast(1.0 / 20922789888000.0);
    pc = fmadd(pc, r2, P::broadcast(-1.0 / 87178291200.0));
    pc = fmadd(pc, r2, P::broadcast(1.0 / 479001600.0));
    pc = fmadd(pc, r2, P::broadcast(-1.0 / 3628800.0));
    pc = fmadd(pc, r2, P::broadcast(1.0 / 40320.0));
    pc = fmadd(pc, r2, P::broadcast(-1.0 / 720.0));
    pc = fmadd(pc, r2, P::broadcast(1.0 / 24.0));
    pc = fmadd(pc, r2, P::broadcast(-0.5));
    const P cos_r = fmadd(pc, r2, P::broadcast(1.0));

    // quadrant: odd swaps sin/cos, bit 1 flips the sin sign, quadrant+1 bit 1
    // flips the cos sign
    const U one = U::broadcast(1);
    const U swap = qbits & one;
    const auto swap_mask = cmp_lt(u52_to_double(swap), pack<W>::broadcast(0.5));
    // swap_mask true when swap == 0 (keep order)
    const P s_base = blend(swap_mask, sin_r, cos_r);
    const P c_base = blend(swap_mask, cos_r, sin_r);
    const U sin_flip = sll(qbits & U::broadcast(2), 62);
    const U cos_flip = sll(add_u64(qbits, one) & U::broadcast(2), 62);

    SinCos<W> out;
    out.sin = bits_to_double(bits_of(s_base) ^ sin_flip);
    out.cos = bits_to_double(bits_of(c_base) ^ cos_flip);
    return out;
}

// log for normal positive doubles: exponent extraction, mantissa folded into
// [1/sqrt2, sqrt2), atanh series in t = (m-1)/(m+1).
template <int W>
inline pack<W> log(pack<W> x) {
    using P = pack<W>;
    using U = upack<W>;
    const U bits = bits_of(x);
    const U mant_mask = U::broadcast(0x000FFFFFFFFFFFFFull);
    const U one_bits = U::broadcast(0x3FF0000000000000ull);
    P m = bits_to_double((bits & mant_mask) | one_bits);
    P e = u52_to_double(srl(bits, 52)) - P::broadcast(1023.0);
    const auto fold = cmp_ge(m, P::broadcast(1.4142135623730951));
    m = blend(fold, m * P::broadcast(0.5), m);
    e = blend(fold, e + P::broadcast(1.0), e);

    const P t = (m - P::broadcast(1.0)) / (m + P::broadcast(1.0));
    const P t2 = t * t;
    P p = P::broadcast(1.0 / 25.0);
    p = fmadd(p, t2, P::broadcast(1.0 / 23.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 21.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 19.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 17.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 15.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 13.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 11.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 9.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 7.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 5.0));
    p = fmadd(p, t2, P::broadcast(1.0 / 3.0));
    p = fmadd(p, t2, P::broadcast(1.0));
    const P log_m = P::broadcast(2.0) * t * p;

    P out = fmadd(e, P::broadcast(1.90821492927058770002e-10), log_m);
    out = fmadd(e, P::broadcast(6.93147180369123816490e-01), out);
    return out;
}

}  // namespace rotor::simd

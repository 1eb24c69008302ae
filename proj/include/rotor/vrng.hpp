// Vectorized counter-based gaussian stream: Philox-4x32-10 with one 32-bit
// word per 64-bit lane, Box-Muller on the two uniforms each block yields.
// Lane j of a pack reproduces the scalar stream of trajectory base+j, so
// ensemble results do not depend on the vector width or on scheduling.

#pragma once

#include "rotor/pack.hpp"
#include "rotor/philox.hpp"
#include "rotor/vmath.hpp"

namespace rotor::simd {

template <int W>
struct PhiloxState {
    upack<W> c0, c1, c2, c3;
};

template <int W>
inline PhiloxState<W> philox_block(upack<W> step_lo, upack<W> step_hi, upack<W> seed_lo,
                                   upack<W> seed_hi, upack<W> key0, upack<W> key1) {
    using U = upack<W>;
    const U mask32 = U::broadcast(0xFFFFFFFFull);
    const U m0 = U::broadcast(philox::kMult0);
    const U m1 = U::broadcast(philox::kMult1);
    const U w0 = U::broadcast(philox::kWeyl0);
    const U w1 = U::broadcast(philox::kWeyl1);

    PhiloxState<W> s{step_lo, step_hi, seed_lo, seed_hi};
    U k0 = key0;
    U k1 = key1;
    for (int r = 0; r < 10; ++r) {
        const U prod0 = mul_lo32(m0, s.c0);
        const U prod1 = mul_lo32(m1, s.c2);
        const U lo0 = prod0 & mask32;
        const U hi0 = srl(prod0, 32);
        const U lo1 = prod1 & mask32;
        const U hi1 = srl(prod1, 32);
        s.c0 = hi1 ^ s.c1 ^ k0;
        s.c1 = lo1;
        s.c2 = hi0 ^ s.c3 ^ k1;
        s.c3 = lo0;
        if (r < 9) {
            k0 = add_u64(k0, w0) & mask32;
            k1 = add_u64(k1, w1) & mask32;
        }
    }
    return s;
}

template <int W>
inline pack<W> uniform_from_words(upack<W> lo, upack<W> hi) {
    using U = upack<W>;
    const U u64 = lo | sll(hi, 32);
    const U mantissa = add_u64(srl(u64, 12), U::broadcast(1));
    return u52_to_double(mantissa) * pack<W>::broadcast(0x1.0p-52);
}

// Gaussian pair generator for one pack of trajectories.
template <int W>
struct GaussianStream {
    upack<W> key0, key1, seed_lo, seed_hi;

    GaussianStream(std::uint64_t seed, std::uint64_t base_trajectory, StreamPurpose purpose)
        : key0(lane_index<W>(base_trajectory) & upack<W>::broadcast(0xFFFFFFFFull)),
          key1(upack<W>::broadcast(static_cast<std::uint64_t>(purpose))),
          seed_lo(upack<W>::broadcast(seed & 0xFFFFFFFFull)),
          seed_hi(upack<W>::broadcast(seed >> 32)) {}

    // The Box-Muller pair of one block per lane, consumed at steps 2b, 2b+1.
    SinCos<W> pair_at(upack<W> block) const {
        using U = upack<W>;
        const PhiloxState<W> out = philox_block<W>(block & U::broadcast(0xFFFFFFFFull),
                                                   srl(block, 32), seed_lo, seed_hi, key0, key1);
        const pack<W> u1 = uniform_from_words<W>(out.c1, out.c0);
        const pack<W> u2 = uniform_from_words<W>(out.c3, out.c2);
        const pack<W> radius = sqrt(pack<W>::broadcast(-2.0) * simd::log(u1));
        const pack<W> angle = pack<W>::broadcast(2.0 * M_PI) * u2;
        SinCos<W> sc = sincos(angle);
        sc.cos = radius * sc.cos;
        sc.sin = radius * sc.sin;
        return sc;
    }

    SinCos<W> pair(std::uint64_t block) const { return pair_at(upack<W>::broadcast(block)); }
};

}  // namespace rotor::simd

// Fixed-width lane packs over double and uint64 with one arithmetic surface,
// specialized for scalar, AVX2+FMA and AVX-512F. Kernels are written once
// against pack<W>; each translation unit instantiates the widths its target
// flags provide. The scalar specialization routes fused multiplies through
// std::fma so all widths execute the same arithmetic and stay bit-identical
// lane for lane.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__) || defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace rotor::simd {

template <int W>
struct pack;
template <int W>
struct upack;
template <int W>
struct dmask;

// {base, base+1, ..., base+W-1} as u64 lanes
template <int W>
upack<W> lane_index(std::uint64_t base);
template <int W>
upack<W> load_u64(const std::uint64_t* p);

// --- scalar lanes -----------------------------------------------------------

template <>
struct dmask<1> {
    bool m;
};

template <>
struct upack<1> {
    std::uint64_t r;
    static upack broadcast(std::uint64_t v) { return {v}; }
};

template <>
struct pack<1> {
    double r;
    static constexpr int width = 1;
    static pack load(const double* p) { return {*p}; }
    void store(double* p) const { *p = r; }
    static pack broadcast(double v) { return {v}; }
};

inline pack<1> operator+(pack<1> a, pack<1> b) { return {a.r + b.r}; }
inline pack<1> operator-(pack<1> a, pack<1> b) { return {a.r - b.r}; }
inline pack<1> operator*(pack<1> a, pack<1> b) { return {a.r * b.r}; }
inline pack<1> operator/(pack<1> a, pack<1> b) { return {a.r / b.r}; }
inline pack<1> fmadd(pack<1> a, pack<1> b, pack<1> c) { return {std::fma(a.r, b.r, c.r)}; }
inline pack<1> fnmadd(pack<1> a, pack<1> b, pack<1> c) { return {std::fma(-a.r, b.r, c.r)}; }
inline pack<1> sqrt(pack<1> a) { return {std::sqrt(a.r)}; }
inline pack<1> abs(pack<1> a) { return {std::fabs(a.r)}; }
inline pack<1> floor(pack<1> a) { return {std::floor(a.r)}; }
inline pack<1> min(pack<1> a, pack<1> b) { return {a.r < b.r ? a.r : b.r}; }
inline pack<1> max(pack<1> a, pack<1> b) { return {a.r > b.r ? a.r : b.r}; }
inline dmask<1> cmp_le(pack<1> a, pack<1> b) { return {a.r <= b.r}; }
inline dmask<1> cmp_lt(pack<1> a, pack<1> b) { return {a.r < b.r}; }
inline dmask<1> cmp_ge(pack<1> a, pack<1> b) { return {a.r >= b.r}; }
inline pack<1> blend(dmask<1> m, pack<1> yes, pack<1> no) { return {m.m ? yes.r : no.r}; }
inline dmask<1> mask_and(dmask<1> a, dmask<1> b) { return {a.m && b.m}; }
inline dmask<1> mask_or(dmask<1> a, dmask<1> b) { return {a.m || b.m}; }
inline dmask<1> mask_andnot(dmask<1> a, dmask<1> b) { return {!a.m && b.m}; }
inline bool any(dmask<1> m) { return m.m; }
// lane bitmask, lane 0 in bit 0
inline unsigned to_bits(dmask<1> m) { return m.m ? 1u : 0u; }

inline upack<1> operator&(upack<1> a, upack<1> b) { return {a.r & b.r}; }
inline upack<1> operator|(upack<1> a, upack<1> b) { return {a.r | b.r}; }
inline upack<1> operator^(upack<1> a, upack<1> b) { return {a.r ^ b.r}; }
inline upack<1> add_u64(upack<1> a, upack<1> b) { return {a.r + b.r}; }
inline upack<1> srl(upack<1> a, int n) { return {a.r >> n}; }
inline upack<1> sll(upack<1> a, int n) { return {a.r << n}; }
// 32x32 -> 64 product of the low halves of each lane
inline upack<1> mul_lo32(upack<1> a, upack<1> b) {
    return {static_cast<std::uint64_t>(static_cast<std::uint32_t>(a.r)) *
            static_cast<std::uint64_t>(static_cast<std::uint32_t>(b.r))};
}
inline upack<1> bits_of(pack<1> a) {
    std::uint64_t u;
    std::memcpy(&u, &a.r, 8);
    return {u};
}
inline pack<1> bits_to_double(upack<1> a) {
    double d;
    std::memcpy(&d, &a.r, 8);
    return {d};
}
inline upack<1> blend_u64(dmask<1> m, upack<1> yes, upack<1> no) { return {m.m ? yes.r : no.r}; }
inline void store_u64(upack<1> a, std::uint64_t* p) { *p = a.r; }
template <>
inline upack<1> load_u64<1>(const std::uint64_t* p) {
    return {*p};
}
// unsigned compare, valid while both sides stay below 2^63
inline dmask<1> cmp_gt_u64(upack<1> a, upack<1> b) { return {a.r > b.r}; }
template <>
inline upack<1> lane_index<1>(std::uint64_t base) {
    return {base};
}

// --- AVX2 + FMA lanes -------------------------------------------------------

#if defined(__AVX2__) && defined(__FMA__)

template <>
struct dmask<4> {
    __m256d m;
};

template <>
struct upack<4> {
    __m256i r;
    static upack broadcast(std::uint64_t v) { return {_mm256_set1_epi64x(static_cast<long long>(v))}; }
};

template <>
struct pack<4> {
    __m256d r;
    static constexpr int width = 4;
    static pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
    void store(double* p) const { _mm256_storeu_pd(p, r); }
    static pack broadcast(double v) { return {_mm256_set1_pd(v)}; }
};

inline pack<4> operator+(pack<4> a, pack<4> b) { return {_mm256_add_pd(a.r, b.r)}; }
inline pack<4> operator-(pack<4> a, pack<4> b) { return {_mm256_sub_pd(a.r, b.r)}; }
inline pack<4> operator*(pack<4> a, pack<4> b) { return {_mm256_mul_pd(a.r, b.r)}; }
inline pack<4> operator/(pack<4> a, pack<4> b) { return {_mm256_div_pd(a.r, b.r)}; }
inline pack<4> fmadd(pack<4> a, pack<4> b, pack<4> c) { return {_mm256_fmadd_pd(a.r, b.r, c.r)}; }
inline pack<4> fnmadd(pack<4> a, pack<4> b, pack<4> c) { return {_mm256_fnmadd_pd(a.r, b.r, c.r)}; }
inline pack<4> sqrt(pack<4> a) { return {_mm256_sqrt_pd(a.r)}; }
inline pack<4> abs(pack<4> a) {
    return {_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.r)};
}
inline pack<4> floor(pack<4> a) { return {_mm256_floor_pd(a.r)}; }
inline pack<4> min(pack<4> a, pack<4> b) { return {_mm256_min_pd(a.r, b.r)}; }
inline pack<4> max(pack<4> a, pack<4> b) { return {_mm256_max_pd(a.r, b.r)}; }
inline dmask<4> cmp_le(pack<4> a, pack<4> b) { return {_mm256_cmp_pd(a.r, b.r, _CMP_LE_OQ)}; }
inline dmask<4> cmp_lt(pack<4> a, pack<4> b) { return {_mm256_cmp_pd(a.r, b.r, _CMP_LT_OQ)}; }
inline dmask<4> cmp_ge(pack<4> a, pack<4> b) { return {_mm256_cmp_pd(a.r, b.r, _CMP_GE_OQ)}; }
inline pack<4> blend(dmask<4> m, pack<4> yes, pack<4> no) {
    return {_mm256_blendv_pd(no.r, yes.r, m.m)};
}
inline dmask<4> mask_and(dmask<4> a, dmask<4> b) { return {_mm256_and_pd(a.m, b.m)}; }
inline dmask<4> mask_or(dmask<4> a, dmask<4> b) { return {_mm256_or_pd(a.m, b.m)}; }
inline dmask<4> mask_andnot(dmask<4> a, dmask<4> b) { return {_mm256_andnot_pd(a.m, b.m)}; }
inline bool any(dmask<4> m) { return _mm256_movemask_pd(m.m) != 0; }
inline unsigned to_bits(dmask<4> m) { return static_cast<unsigned>(_mm256_movemask_pd(m.m)); }

inline upack<4> operator&(upack<4> a, upack<4> b) { return {_mm256_and_si256(a.r, b.r)}; }
inline upack<4> operator|(upack<4> a, upack<4> b) { return {_mm256_or_si256(a.r, b.r)}; }
inline upack<4> operator^(upack<4> a, upack<4> b) { return {_mm256_xor_si256(a.r, b.r)}; }
inline upack<4> add_u64(upack<4> a, upack<4> b) { return {_mm256_add_epi64(a.r, b.r)}; }
inline upack<4> srl(upack<4> a, int n) { return {_mm256_srli_epi64(a.r, n)}; }
inline upack<4> sll(upack<4> a, int n) { return {_mm256_slli_epi64(a.r, n)}; }
inline upack<4> mul_lo32(upack<4> a, upack<4> b) { return {_mm256_mul_epu32(a.r, b.r)}; }
inline upack<4> bits_of(pack<4> a) { return {_mm256_castpd_si256(a.r)}; }
inline pack<4> bits_to_double(upack<4> a) { return {_mm256_castsi256_pd(a.r)}; }
inline upack<4> blend_u64(dmask<4> m, upack<4> yes, upack<4> no) {
    return {_mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(no.r), _mm256_castsi256_pd(yes.r), m.m))};
}
inline void store_u64(upack<4> a, std::uint64_t* p) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), a.r);
}
template <>
inline upack<4> load_u64<4>(const std::uint64_t* p) {
    return {_mm256_loadu_si256(reinterpret_cast<const __m256i*>(p))};
}
inline dmask<4> cmp_gt_u64(upack<4> a, upack<4> b) {
    return {_mm256_castsi256_pd(_mm256_cmpgt_epi64(a.r, b.r))};
}
template <>
inline upack<4> lane_index<4>(std::uint64_t base) {
    const long long b = static_cast<long long>(base);
    return {_mm256_set_epi64x(b + 3, b + 2, b + 1, b)};
}

#endif  // AVX2 && FMA

// --- AVX-512F lanes ---------------------------------------------------------

#if defined(__AVX512F__)

template <>
struct dmask<8> {
    __mmask8 m;
};

template <>
struct upack<8> {
    __m512i r;
    static upack broadcast(std::uint64_t v) { return {_mm512_set1_epi64(static_cast<long long>(v))}; }
};

template <>
struct pack<8> {
    __m512d r;
    static constexpr int width = 8;
    static pack load(const double* p) { return {_mm512_loadu_pd(p)}; }
    void store(double* p) const { _mm512_storeu_pd(p, r); }
    static pack broadcast(double v) { return {_mm512_set1_pd(v)}; }
};

inline pack<8> operator+(pack<8> a, pack<8> b) { return {_mm512_add_pd(a.r, b.r)}; }
inline pack<8> operator-(pack<8> a, pack<8> b) { return {_mm512_sub_pd(a.r, b.r)}; }
inline pack<8> operator*(pack<8> a, pack<8> b) { return {_mm512_mul_pd(a.r, b.r)}; }
inline pack<8> operator/(pack<8> a, pack<8> b) { return {_mm512_div_pd(a.r, b.r)}; }
inline pack<8> fmadd(pack<8> a, pack<8> b, pack<8> c) { return {_mm512_fmadd_pd(a.r, b.r, c.r)}; }
inline pack<8> fnmadd(pack<8> a, pack<8> b, pack<8> c) { return {_mm512_fnmadd_pd(a.r, b.r, c.r)}; }
inline pack<8> sqrt(pack<8> a) { return {_mm512_sqrt_pd(a.r)}; }
inline pack<8> abs(pack<8> a) { return {_mm512_abs_pd(a.r)}; }
inline pack<8> floor(pack<8> a) { return {_mm512_roundscale_pd(a.r, 0x09)}; }
inline pack<8> min(pack<8> a, pack<8> b) { return {_mm512_min_pd(a.r, b.r)}; }
inline pack<8> max(pack<8> a, pack<8> b) { return {_mm512_max_pd(a.r, b.r)}; }
inline dmask<8> cmp_le(pack<8> a, pack<8> b) { return {_mm512_cmp_pd_mask(a.r, b.r, _CMP_LE_OQ)}; }
inline dmask<8> cmp_lt(pack<8> a, pack<8> b) { return {_mm512_cmp_pd_mask(a.r, b.r, _CMP_LT_OQ)}; }
inline dmask<8> cmp_ge(pack<8> a, pack<8> b) { return {_mm512_cmp_pd_mask(a.r, b.r, _CMP_GE_OQ)}; }
inline pack<8> blend(dmask<8> m, pack<8> yes, pack<8> no) {
    return {_mm512_mask_mov_pd(no.r, m.m, yes.r)};
}
inline dmask<8> mask_and(dmask<8> a, dmask<8> b) { return {static_cast<__mmask8>(a.m & b.m)}; }
inline dmask<8> mask_or(dmask<8> a, dmask<8> b) { return {static_cast<__mmask8>(a.m | b.m)}; }
inline dmask<8> mask_andnot(dmask<8> a, dmask<8> b) {
    return {static_cast<__mmask8>(~a.m & b.m)};
}
inline bool any(dmask<8> m) { return m.m != 0; }
inline unsigned to_bits(dmask<8> m) { return m.m; }

inline upack<8> operator&(upack<8> a, upack<8> b) { return {_mm512_and_epi64(a.r, b.r)}; }
inline upack<8> operator|(upack<8> a, upack<8> b) { return {_mm512_or_epi64(a.r, b.r)}; }
inline upack<8> operator^(upack<8> a, upack<8> b) { return {_mm512_xor_epi64(a.r, b.r)}; }
inline upack<8> add_u64(upack<8> a, upack<8> b) { return {_mm512_add_epi64(a.r, b.r)}; }
inline upack<8> srl(upack<8> a, int n) { return {_mm512_srli_epi64(a.r, static_cast<unsigned>(n))}; }
inline upack<8> sll(upack<8> a, int n) { return {_mm512_slli_epi64(a.r, static_cast<unsigned>(n))}; }
inline upack<8> mul_lo32(upack<8> a, upack<8> b) { return {_mm512_mul_epu32(a.r, b.r)}; }
inline upack<8> bits_of(pack<8> a) { return {_mm512_castpd_si512(a.r)}; }
inline pack<8> bits_to_double(upack<8> a) { return {_mm512_castsi512_pd(a.r)}; }
inline upack<8> blend_u64(dmask<8> m, upack<8> yes, upack<8> no) {
    return {_mm512_mask_mov_epi64(no.r, m.m, yes.r)};
}
inline void store_u64(upack<8> a, std::uint64_t* p) { _mm512_storeu_si512(p, a.r); }
template <>
inline upack<8> load_u64<8>(const std::uint64_t* p) {
    return {_mm512_loadu_si512(p)};
}
inline dmask<8> cmp_gt_u64(upack<8> a, upack<8> b) {
    return {_mm512_cmp_epi64_mask(a.r, b.r, _MM_CMPINT_NLE)};
}
template <>
inline upack<8> lane_index<8>(std::uint64_t base) {
    const long long b = static_cast<long long>(base);
    return {_mm512_set_epi64(b + 7, b + 6, b + 5, b + 4, b + 3, b + 2, b + 1, b)};
}

#endif  // AVX512F

}  // namespace rotor::simd

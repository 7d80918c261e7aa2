// Compiled with -mavx2. Must only be entered after the runtime CPU check.
#include <immintrin.h>

#include <cstring>

#include "cdp/kernels.hpp"

namespace cdp::detail {
namespace {

inline __m256i rotl32(__m256i x, int r) {
    return _mm256_or_si256(_mm256_slli_epi32(x, r), _mm256_srli_epi32(x, 32 - r));
}

inline __m256i absorb8(__m256i h, __m256i k) {
    k = _mm256_mullo_epi32(k, _mm256_set1_epi32(static_cast<int>(0xCC9E2D51u)));
    k = rotl32(k, 15);
    k = _mm256_mullo_epi32(k, _mm256_set1_epi32(static_cast<int>(0x1B873593u)));
    h = _mm256_xor_si256(h, k);
    h = rotl32(h, 13);
    h = _mm256_add_epi32(_mm256_mullo_epi32(h, _mm256_set1_epi32(5)),
                         _mm256_set1_epi32(static_cast<int>(0xE6546B64u)));
    return h;
}

inline __m256i finalize8(__m256i h, std::uint32_t nwords) {
    h = _mm256_xor_si256(h, _mm256_set1_epi32(static_cast<int>(nwords * 4u)));
    h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 16));
    h = _mm256_mullo_epi32(h, _mm256_set1_epi32(static_cast<int>(0x85EBCA6Bu)));
    h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 13));
    h = _mm256_mullo_epi32(h, _mm256_set1_epi32(static_cast<int>(0xC2B2AE35u)));
    h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 16));
    return h;
}

inline __m256d to_unit4(__m128i a, __m128i b) {
    const __m256i a64 = _mm256_cvtepu32_epi64(a);
    const __m256i b64 = _mm256_cvtepu32_epi64(b);
    __m256i m = _mm256_or_si256(_mm256_slli_epi64(a64, 20), _mm256_srli_epi64(b64, 12));
    m = _mm256_or_si256(m, _mm256_set1_epi64x(0x3FF0000000000000ll));
    return _mm256_sub_pd(_mm256_set1_pd(2.0), _mm256_castsi256_pd(m));
}

}  // namespace

void hash_uniforms_avx2(const rng::PrefixState& prefix, std::int32_t first, std::span<double> out) {
    const std::size_t n = out.size();
    const __m256i ha = _mm256_set1_epi32(static_cast<int>(prefix.a));
    const __m256i hb = _mm256_set1_epi32(static_cast<int>(prefix.b));
    const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    const __m256i flip = _mm256_set1_epi32(static_cast<int>(0xA5A5A5A5u));
    const std::uint32_t nwords = prefix.nwords + 1;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i w = _mm256_add_epi32(_mm256_set1_epi32(first + static_cast<std::int32_t>(i)), lane);
        const __m256i a = finalize8(absorb8(ha, w), nwords);
        const __m256i b = finalize8(absorb8(hb, _mm256_xor_si256(w, flip)), nwords);
        _mm256_storeu_pd(out.data() + i, to_unit4(_mm256_castsi256_si128(a), _mm256_castsi256_si128(b)));
        _mm256_storeu_pd(out.data() + i + 4,
                         to_unit4(_mm256_extracti128_si256(a, 1), _mm256_extracti128_si256(b, 1)));
    }
    if (i < n) hash_uniforms_scalar(prefix, first + static_cast<std::int32_t>(i), out.subspan(i));
}

void constraints_from_uniforms_avx2(std::span<const double> x, std::span<const double> cumulative,
                                    std::uint8_t top, std::span<std::uint8_t> out) {
    const std::size_t n = x.size();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256i topv = _mm256_set1_epi64x(top);
    alignas(32) std::int64_t lanes[4];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        __m256i count = _mm256_setzero_si256();
        for (double c : cumulative) {
            const __m256d le = _mm256_cmp_pd(_mm256_set1_pd(c), xv, _CMP_LE_OQ);
            count = _mm256_sub_epi64(count, _mm256_castpd_si256(le));
        }
        const __m256d at_one = _mm256_cmp_pd(xv, one, _CMP_GE_OQ);
        count = _mm256_castpd_si256(
            _mm256_blendv_pd(_mm256_castsi256_pd(count), _mm256_castsi256_pd(topv), at_one));
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), count);
        for (int k = 0; k < 4; ++k) out[i + static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(lanes[k]);
    }
    if (i < n) constraints_from_uniforms_scalar(x.subspan(i), cumulative, top, out.subspan(i));
}

void open_mask_avx2(std::span<const double> clocks, std::span<const std::uint8_t> opened, double t,
                    std::span<std::uint8_t> out) {
    const std::size_t n = clocks.size();
    const __m256d tv = _mm256_set1_pd(t);
    const __m128i zero = _mm_setzero_si128();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        int le_bits = 0;
        for (int q = 0; q < 4; ++q) {
            const __m256d c = _mm256_loadu_pd(clocks.data() + i + 4 * static_cast<std::size_t>(q));
            le_bits |= _mm256_movemask_pd(_mm256_cmp_pd(c, tv, _CMP_LE_OQ)) << (4 * q);
        }
        const __m128i op = _mm_loadu_si128(reinterpret_cast<const __m128i*>(opened.data() + i));
        const int open_bits = ~_mm_movemask_epi8(_mm_cmpeq_epi8(op, zero)) & 0xFFFF;
        const int bits = le_bits & open_bits;
        // Expand 16 bits to 16 bytes of 0/1.
        const __m128i spread = _mm_shuffle_epi8(_mm_cvtsi32_si128(bits),
                                                _mm_setr_epi8(0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1));
        const __m128i sel = _mm_setr_epi8(1, 2, 4, 8, 16, 32, 64, -128, 1, 2, 4, 8, 16, 32, 64, -128);
        const __m128i hit = _mm_cmpeq_epi8(_mm_and_si128(spread, sel), sel);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + i), _mm_and_si128(hit, _mm_set1_epi8(1)));
    }
    if (i < n) open_mask_scalar(clocks.subspan(i), opened.subspan(i), t, out.subspan(i));
}

}  // namespace cdp::detail

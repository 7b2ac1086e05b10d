#if defined(WCSCHED_HAVE_AVX2)

#include "wcsched/kernels.hpp"

#include <immintrin.h>

namespace wcsched::kern::avx2 {

namespace {

inline __m256i min_epi64(__m256i a, __m256i b) {
    // AVX2 has no 64-bit integer min; select through a signed compare.
    __m256i gt = _mm256_cmpgt_epi64(a, b);
    return _mm256_blendv_epi8(a, b, gt);
}

inline __m256i max_epi64(__m256i a, __m256i b) {
    __m256i gt = _mm256_cmpgt_epi64(a, b);
    return _mm256_blendv_epi8(b, a, gt);
}

inline i64 hmax_epi64(__m256i v) {
    alignas(32) i64 lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
    i64 m = lanes[0];
    if (lanes[1] > m) m = lanes[1];
    if (lanes[2] > m) m = lanes[2];
    if (lanes[3] > m) m = lanes[3];
    return m;
}

} // namespace

void min_add(i64* dst, const i64* src, i64 add, std::size_t n) {
    const __m256i vadd = _mm256_set1_epi64x(add);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + k));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        d = min_epi64(d, _mm256_add_epi64(s, vadd));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), d);
    }
    for (; k < n; ++k) {
        i64 cand = src[k] + add;
        if (cand < dst[k]) dst[k] = cand;
    }
}

void min_vec(i64* dst, const i64* src, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + k));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), min_epi64(d, s));
    }
    for (; k < n; ++k)
        if (src[k] < dst[k]) dst[k] = src[k];
}

void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n) {
    const __m256i vb = _mm256_set1_epi64x(bound);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), min_epi64(s, vb));
    }
    for (; k < n; ++k) dst[k] = src[k] < bound ? src[k] : bound;
}

void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n) {
    const __m256i vsub = _mm256_set1_epi64x(sub);
    const __m256i zero = _mm256_setzero_si256();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        __m256i r = max_epi64(_mm256_sub_epi64(s, vsub), zero);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), r);
    }
    for (; k < n; ++k) {
        i64 r = src[k] - sub;
        dst[k] = r > 0 ? r : 0;
    }
}

void add_vec(i64* dst, const i64* src, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + k));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + k), _mm256_add_epi64(d, s));
    }
    for (; k < n; ++k) dst[k] += src[k];
}

i64 max_affine_gap(const i64* w, i64 slope, std::size_t n) {
    i64 best = w[0];
    std::size_t k = 1;
    if (n >= 5) {
        // Vector lanes track w[k] - k*slope with a striding ramp.
        __m256i ramp = _mm256_set_epi64x(4 * slope, 3 * slope, 2 * slope, 1 * slope);
        const __m256i stride = _mm256_set1_epi64x(4 * slope);
        __m256i acc = _mm256_set1_epi64x(best);
        for (; k + 4 <= n; k += 4) {
            __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w + k));
            acc = max_epi64(acc, _mm256_sub_epi64(v, ramp));
            ramp = _mm256_add_epi64(ramp, stride);
        }
        best = hmax_epi64(acc);
    }
    i64 ramp_tail = static_cast<i64>(k) * slope;
    for (; k < n; ++k) {
        i64 cand = w[k] - ramp_tail;
        if (cand > best) best = cand;
        ramp_tail += slope;
    }
    return best;
}

} // namespace wcsched::kern::avx2

#endif // WCSCHED_HAVE_AVX2

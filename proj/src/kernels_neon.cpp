#if defined(__aarch64__)

#include "wcsched/kernels.hpp"

#include <arm_neon.h>

namespace wcsched::kern::neon {

namespace {

inline int64x2_t min_s64(int64x2_t a, int64x2_t b) {
    // No vminq for 64-bit lanes; select through a compare.
    uint64x2_t gt = vcgtq_s64(a, b);
    return vbslq_s64(gt, b, a);
}

inline int64x2_t max_s64(int64x2_t a, int64x2_t b) {
    uint64x2_t gt = vcgtq_s64(a, b);
    return vbslq_s64(gt, a, b);
}

} // namespace

void min_add(i64* dst, const i64* src, i64 add, std::size_t n) {
    const int64x2_t vadd = vdupq_n_s64(add);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        int64x2_t d = vld1q_s64(dst + k);
        int64x2_t s = vld1q_s64(src + k);
        vst1q_s64(dst + k, min_s64(d, vaddq_s64(s, vadd)));
    }
    for (; k < n; ++k) {
        i64 cand = src[k] + add;
        if (cand < dst[k]) dst[k] = cand;
    }
}

void min_vec(i64* dst, const i64* src, std::size_t n) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        vst1q_s64(dst + k, min_s64(vld1q_s64(dst + k), vld1q_s64(src + k)));
    for (; k < n; ++k)
        if (src[k] < dst[k]) dst[k] = src[k];
}

void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n) {
    const int64x2_t vb = vdupq_n_s64(bound);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) vst1q_s64(dst + k, min_s64(vld1q_s64(src + k), vb));
    for (; k < n; ++k) dst[k] = src[k] < bound ? src[k] : bound;
}

void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n) {
    const int64x2_t vsub = vdupq_n_s64(sub);
    const int64x2_t zero = vdupq_n_s64(0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        vst1q_s64(dst + k, max_s64(vsubq_s64(vld1q_s64(src + k), vsub), zero));
    for (; k < n; ++k) {
        i64 r = src[k] - sub;
        dst[k] = r > 0 ? r : 0;
    }
}

void add_vec(i64* dst, const i64* src, std::size_t n) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        vst1q_s64(dst + k, vaddq_s64(vld1q_s64(dst + k), vld1q_s64(src + k)));
    for (; k < n; ++k) dst[k] += src[k];
}

i64 max_affine_gap(const i64* w, i64 slope, std::size_t n) {
    i64 best = w[0];
    std::size_t k = 1;
    if (n >= 3) {
        int64x2_t ramp = {slope, 2 * slope};
        const int64x2_t stride = vdupq_n_s64(2 * slope);
        int64x2_t acc = vdupq_n_s64(best);
        for (; k + 2 <= n; k += 2) {
            acc = max_s64(acc, vsubq_s64(vld1q_s64(w + k), ramp));
            ramp = vaddq_s64(ramp, stride);
        }
        i64 lane0 = vgetq_lane_s64(acc, 0);
        i64 lane1 = vgetq_lane_s64(acc, 1);
        best = lane0 > lane1 ? lane0 : lane1;
    }
    i64 ramp_tail = static_cast<i64>(k) * slope;
    for (; k < n; ++k) {
        i64 cand = w[k] - ramp_tail;
        if (cand > best) best = cand;
        ramp_tail += slope;
    }
    return best;
}

} // namespace wcsched::kern::neon

#endif // __aarch64__

#include "wcsched/kernels.hpp"

#include <algorithm>

namespace wcsched::kern::scalar {

void min_add(i64* dst, const i64* src, i64 add, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = std::min(dst[k], src[k] + add);
}

void min_vec(i64* dst, const i64* src, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = std::min(dst[k], src[k]);
}

void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = std::min(src[k], bound);
}

void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] = std::max<i64>(src[k] - sub, 0);
}

void add_vec(i64* dst, const i64* src, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst[k] += src[k];
}

i64 max_affine_gap(const i64* w, i64 slope, std::size_t n) {
    i64 best = w[0];
    i64 ramp = 0;
    for (std::size_t k = 1; k < n; ++k) {
        ramp += slope;
        best = std::max(best, w[k] - ramp);
    }
    return best;
}

} // namespace wcsched::kern::scalar

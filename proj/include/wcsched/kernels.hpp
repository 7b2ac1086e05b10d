#pragma once

#include <cstddef>
#include <cstdint>

// Saturating integer kernels shared by the algebra core. Every kernel has a
// scalar reference implementation and, where the target supports it, an AVX2
// or NEON variant selected once at runtime. The variants are bit-for-bit
// equivalent to the scalar reference (see tests/test_kernels.cpp).

namespace wcsched::kern {

using i64 = std::int64_t;

enum class Backend { scalar, avx2, neon };

/// Backend picked at startup for the current CPU.
Backend active_backend() noexcept;

/// Override the dispatch, e.g. to force the scalar reference in tests.
/// Throws wcsched::Error{invalid_argument} if the CPU lacks the backend.
void force_backend(Backend backend);

/// dst[k] = min(dst[k], src[k] + add)
void min_add(i64* dst, const i64* src, i64 add, std::size_t n);

/// dst[k] = min(dst[k], src[k])
void min_vec(i64* dst, const i64* src, std::size_t n);

/// dst[k] = min(src[k], bound)
void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n);

/// dst[k] = max(src[k] - sub, 0)
void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n);

/// dst[k] += src[k]
void add_vec(i64* dst, const i64* src, std::size_t n);

/// max over k in [0, n) of (w[k] - k * slope); 0 if n == 0 is not meaningful,
/// callers guarantee n >= 1.
i64 max_affine_gap(const i64* w, i64 slope, std::size_t n);

namespace scalar {
void min_add(i64* dst, const i64* src, i64 add, std::size_t n);
void min_vec(i64* dst, const i64* src, std::size_t n);
void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n);
void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n);
void add_vec(i64* dst, const i64* src, std::size_t n);
i64 max_affine_gap(const i64* w, i64 slope, std::size_t n);
} // namespace scalar

#if defined(WCSCHED_HAVE_AVX2)
namespace avx2 {
void min_add(i64* dst, const i64* src, i64 add, std::size_t n);
void min_vec(i64* dst, const i64* src, std::size_t n);
void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n);
void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n);
void add_vec(i64* dst, const i64* src, std::size_t n);
i64 max_affine_gap(const i64* w, i64 slope, std::size_t n);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void min_add(i64* dst, const i64* src, i64 add, std::size_t n);
void min_vec(i64* dst, const i64* src, std::size_t n);
void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n);
void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n);
void add_vec(i64* dst, const i64* src, std::size_t n);
i64 max_affine_gap(const i64* w, i64 slope, std::size_t n);
} // namespace neon
#endif

} // namespace wcsched::kern

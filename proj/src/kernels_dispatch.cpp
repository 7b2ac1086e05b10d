#include "wcsched/kernels.hpp"

#include "wcsched/error.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace wcsched {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_horizon: return "invalid-horizon";
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::guarantee_violation: return "guarantee-violation";
        case Errc::causality_violation: return "causality-violation";
        case Errc::oracle_too_large: return "oracle-too-large";
        case Errc::not_schedulable: return "not-schedulable";
        case Errc::infeasible_total: return "infeasible-total";
        case Errc::no_max_slack_schedule: return "no-max-slack-schedule";
        case Errc::no_schedule: return "no-schedule";
        case Errc::unsupported_service_kind: return "unsupported-service-kind";
        case Errc::invalid_base: return "invalid-base";
        case Errc::infeasible_design: return "infeasible-design";
        case Errc::internal_policy_error: return "internal-policy-error";
        case Errc::parse_error: return "parse-error";
    }
    return "unknown";
}

} // namespace wcsched

namespace wcsched::kern {

namespace {

struct Table {
    void (*min_add)(i64*, const i64*, i64, std::size_t);
    void (*min_vec)(i64*, const i64*, std::size_t);
    void (*min_scalar)(i64*, const i64*, i64, std::size_t);
    void (*sub_clip)(i64*, const i64*, i64, std::size_t);
    void (*add_vec)(i64*, const i64*, std::size_t);
    i64 (*max_affine_gap)(const i64*, i64, std::size_t);
};

constexpr Table kScalar = {scalar::min_add,  scalar::min_vec, scalar::min_scalar,
                           scalar::sub_clip, scalar::add_vec, scalar::max_affine_gap};

#if defined(WCSCHED_HAVE_AVX2)
constexpr Table kAvx2 = {avx2::min_add,  avx2::min_vec, avx2::min_scalar,
                         avx2::sub_clip, avx2::add_vec, avx2::max_affine_gap};
#endif
#if defined(__aarch64__)
constexpr Table kNeon = {neon::min_add,  neon::min_vec, neon::min_scalar,
                         neon::sub_clip, neon::add_vec, neon::max_affine_gap};
#endif

bool cpu_has(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(WCSCHED_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend pick_default() noexcept {
    // WCSCHED_KERNEL=scalar|avx2|neon overrides autodetection.
    if (const char* env = std::getenv("WCSCHED_KERNEL")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has(Backend::avx2)) return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && cpu_has(Backend::neon)) return Backend::neon;
    }
    if (cpu_has(Backend::avx2)) return Backend::avx2;
    if (cpu_has(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

const Table* table_for(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return &kScalar;
#if defined(WCSCHED_HAVE_AVX2)
        case Backend::avx2: return &kAvx2;
#endif
#if defined(__aarch64__)
        case Backend::neon: return &kNeon;
#endif
        default: return &kScalar;
    }
}

std::atomic<Backend> g_backend{pick_default()};

} // namespace

Backend active_backend() noexcept { return g_backend.load(std::memory_order_relaxed); }

void force_backend(Backend backend) {
    if (!cpu_has(backend)) raise(Errc::invalid_argument, "kernel backend unavailable on this CPU");
    g_backend.store(backend, std::memory_order_relaxed);
}

void min_add(i64* dst, const i64* src, i64 add, std::size_t n) {
    table_for(active_backend())->min_add(dst, src, add, n);
}
void min_vec(i64* dst, const i64* src, std::size_t n) {
    table_for(active_backend())->min_vec(dst, src, n);
}
void min_scalar(i64* dst, const i64* src, i64 bound, std::size_t n) {
    table_for(active_backend())->min_scalar(dst, src, bound, n);
}
void sub_clip(i64* dst, const i64* src, i64 sub, std::size_t n) {
    table_for(active_backend())->sub_clip(dst, src, sub, n);
}
void add_vec(i64* dst, const i64* src, std::size_t n) {
    table_for(active_backend())->add_vec(dst, src, n);
}
i64 max_affine_gap(const i64* w, i64 slope, std::size_t n) {
    return table_for(active_backend())->max_affine_gap(w, slope, n);
}

} // namespace wcsched::kern

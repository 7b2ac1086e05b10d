#include "wcsched/dualcurve.hpp"

#include "wcsched/kernels.hpp"

#include <algorithm>

namespace wcsched {

CumVec eval_dual(const DualCurveService& svc, const CumVec& q) {
    require_same_horizon(svc.dynamic_curve, q, "eval_dual");
    const auto u = svc.dynamic_curve.entries();
    const auto v = svc.static_curve.entries();
    const std::size_t w = u.size();
    std::vector<i64> out(u.begin(), u.end());
    for (std::size_t i = 1; i < w; ++i) {
        // out[j] = min(out[j], q[i] + v[j-i]) for j in [i, w)
        kern::min_add(out.data() + i, v.data(), q[static_cast<i64>(i)], w - i);
    }
    return CumVec(std::move(out));
}

CumVec conditioned_dynamic(const DualCurveService& svc, i64 q1) {
    if (q1 < 0) raise(Errc::invalid_argument, "queue length must be >= 0");
    const auto u = svc.dynamic_curve.entries();
    const auto v = svc.static_curve.entries();
    const std::size_t w = u.size();
    std::vector<i64> out(u.begin(), u.end());
    out[0] = 0;
    // out[j] = min(u[j], q1 + v[j-1]) for j >= 1.
    kern::min_add(out.data() + 1, v.data(), q1, w - 1);
    return CumVec(std::move(out));
}

i64 immediate_requirement(const DualCurveService& svc, i64 q1) {
    return std::min(svc.dynamic_curve[1], q1);
}

namespace {

DualCurveService shift_update(const DualCurveService& svc, i64 q1, i64 d) {
    CumVec next = conditioned_dynamic(svc, q1).shift_left_clip(d);
    return DualCurveService(std::move(next), svc.static_curve);
}

} // namespace

DualCurveService update_dual(const DualCurveService& svc, i64 q1, i64 d) {
    if (d > q1) raise(Errc::causality_violation, "serving more than is queued");
    if (d < immediate_requirement(svc, q1))
        raise(Errc::guarantee_violation, "serving less than the immediate requirement");
    return shift_update(svc, q1, d);
}

DualCurveService update_dual_degraded(const DualCurveService& svc, i64 q1, i64 d) {
    if (d > q1) raise(Errc::causality_violation, "serving more than is queued");
    return shift_update(svc, q1, d);
}

SpectralMatrix spectrum_dual(const DualCurveService& svc, i64 backlog) {
    if (backlog < 0) raise(Errc::invalid_argument, "backlog must be >= 0");
    const i64 h = svc.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    const auto u = svc.dynamic_curve.entries();
    const auto v = svc.static_curve.entries();
    std::vector<std::vector<i64>> rows(w, std::vector<i64>(w, 0));
    rows[0].assign(u.begin(), u.end());
    std::vector<i64> cap(w);
    kern::sub_clip(cap.data(), u.data(), backlog, w);
    for (i64 i = 1; i <= h; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        for (i64 j = i + 1; j <= h; ++j)
            row[static_cast<std::size_t>(j)] =
                std::min(cap[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j - i)]);
    }
    return SpectralMatrix(backlog, std::move(rows));
}

CumVec must_serve_curve(const DualCurveService& svc, i64 q1) {
    if (q1 < 0) raise(Errc::invalid_argument, "queue length must be >= 0");
    return svc.dynamic_curve.pointwise_min(q1);
}

TaskDeadlineList deadlines(const DualCurveService& svc, i64 q1) {
    CumVec p = must_serve_curve(svc, q1);
    TaskDeadlineList out;
    out.reserve(static_cast<std::size_t>(q1));
    // Tasks h with p[j+1] >= h > p[j] share deadline offset j; walk the curve
    // once instead of searching per task.
    i64 h = 1;
    for (i64 j = 0; j <= p.horizon() && h <= q1; ++j) {
        const i64 upto = std::min(p[j + 1], q1);
        for (; h <= upto; ++h) out.push_back(j);
        if (j == p.horizon()) break;
    }
    for (; h <= q1; ++h) out.push_back(kBeyondHorizon);
    return out;
}

DualCurveService compose(const DualCurveService& inner, const DualCurveService& outer,
                         i64 b_outer) {
    require_same_horizon(inner.dynamic_curve, outer.dynamic_curve, "compose");
    if (b_outer < 0) raise(Errc::invalid_argument, "outer backlog must be >= 0");
    const auto ui = inner.dynamic_curve.entries();
    const auto vo = outer.static_curve.entries();
    const std::size_t w = ui.size();
    // u[j] = min(u_outer[j], min over 1 <= i <= j of (u_inner[i] + b + v_outer[j-i]))
    std::vector<i64> u(outer.dynamic_curve.entries().begin(),
                       outer.dynamic_curve.entries().end());
    for (std::size_t i = 1; i < w; ++i)
        kern::min_add(u.data() + i, vo.data(), ui[i] + b_outer, w - i);
    CumVec v = minplus_conv(inner.static_curve, outer.static_curve);
    return DualCurveService(CumVec(std::move(u)), std::move(v));
}

CumVec rate_latency_curve(i64 rate, i64 latency, i64 burst, i64 horizon) {
    if (rate < 0 || latency < 0 || burst < 0)
        raise(Errc::invalid_argument, "rate, latency, burst must be >= 0");
    std::vector<i64> e(static_cast<std::size_t>(horizon) + 1, 0);
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
    for (i64 j = latency + 1; j <= horizon; ++j)
        e[static_cast<std::size_t>(j)] = burst + rate * (j - latency);
    return CumVec(std::move(e));
}

} // namespace wcsched

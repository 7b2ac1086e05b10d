#pragma once

#include "wcsched/cumvec.hpp"
#include "wcsched/minplus.hpp"

#include <vector>

namespace wcsched {

/// Worst-case service identified by a pair of cumulative curves. The dynamic
/// curve evolves as the flow is served; the static curve never changes. The
/// flow's backlog is deliberately not stored here: it lives with the flow
/// state and is passed in where needed.
struct DualCurveService {
    CumVec dynamic_curve; ///< row 0 of the identifying matrix
    CumVec static_curve;  ///< every later row, right-shifted

    DualCurveService(CumVec u, CumVec v) : dynamic_curve(std::move(u)), static_curve(std::move(v)) {
        require_same_horizon(dynamic_curve, static_curve, "dual-curve service");
    }

    i64 horizon() const noexcept { return dynamic_curve.horizon(); }

    bool operator==(const DualCurveService& other) const noexcept = default;
};

/// Deadline offsets for the queued tasks h = 1..q, nondecreasing,
/// kBeyondHorizon allowed.
using TaskDeadlineList = std::vector<i64>;

/// result[j] = min(u[j], min over 1 <= i <= j of (q[i] + v[j-i])).
CumVec eval_dual(const DualCurveService& svc, const CumVec& q);

/// Dynamic curve conditioned on this slot's queue length:
/// result[j] = min(u[j], q1 + v[j-1]) for j >= 1, result[0] = 0.
CumVec conditioned_dynamic(const DualCurveService& svc, i64 q1);

/// Immediate service requirement this slot: min(u[1], q1).
i64 immediate_requirement(const DualCurveService& svc, i64 q1);

/// Slot update after serving d of q1 queued tasks; the static curve is
/// unchanged. Requires immediate_requirement <= d <= q1.
DualCurveService update_dual(const DualCurveService& svc, i64 q1, i64 d);

/// Degraded update for callers that under-served the guarantee (d < p): the
/// overdue remainder is clamped into the next slot's immediate requirement.
/// Returns the updated service; still requires d <= q1.
DualCurveService update_dual_degraded(const DualCurveService& svc, i64 q1, i64 d);

/// Full spectrum of the service conditioned on backlog b: row 0 is the
/// dynamic curve, row i > 0 is min((u[j]-b)^+, v[j-i]).
SpectralMatrix spectrum_dual(const DualCurveService& svc, i64 backlog);

/// Least tasks that must be served during [t, t+j) given q1 queued:
/// result[j] = min(u[j], q1).
CumVec must_serve_curve(const DualCurveService& svc, i64 q1);

/// Deadline offset of the h-th queued task, h = 1..q1 (the slot by which the
/// guarantee forces it to be served, for every realization).
TaskDeadlineList deadlines(const DualCurveService& svc, i64 q1);

/// Service of two servers in series (inner feeds outer, the outer holding
/// b_outer of the flow's backlog) collapsed into one dual-curve service.
DualCurveService compose(const DualCurveService& inner, const DualCurveService& outer,
                         i64 b_outer);

/// Convenience template: latency slots of nothing, then `rate` per slot on
/// top of an initial `burst`.
CumVec rate_latency_curve(i64 rate, i64 latency, i64 burst, i64 horizon);

} // namespace wcsched

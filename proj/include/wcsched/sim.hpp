#pragma once

#include "wcsched/dualcurve.hpp"
#include "wcsched/feasible.hpp"
#include "wcsched/oracle.hpp"
#include "wcsched/sched.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace wcsched {

/// A flow's worst-case service in any supported representation, with the
/// uniform per-slot interface the engine needs.
class FlowService {
public:
    enum class Kind { dual_curve, spectral, tabulated };

    explicit FlowService(DualCurveService svc) : repr_(std::move(svc)) {}
    explicit FlowService(SpectralMatrix svc) : repr_(std::move(svc)) {}
    explicit FlowService(std::shared_ptr<const oracle::TabulatedService> svc)
        : repr_(std::move(svc)) {}

    Kind kind() const noexcept;
    i64 horizon() const;

    /// Conditional spectral top row given this slot's queue length,
    /// materialized at the system horizon (saturating extension).
    CumVec cond_row0(i64 q1, i64 sys_horizon) const;

    /// Immediate requirement p this slot.
    i64 immediate(i64 q1) const;

    /// Serve d of q1 queued tasks and advance one slot. With allow_degraded,
    /// d < p is tolerated: the overdue remainder folds into the next slot.
    void update(i64 q1, i64 d, bool allow_degraded);

    /// Unconditional spectral value accessor given the current backlog.
    SpectrumFn spectrum(i64 backlog) const;

    /// psi(q) for verification; q may have a longer horizon than the service
    /// (curves extend by saturation).
    CumVec eval(const CumVec& q, i64 backlog) const;

    const DualCurveService* as_dual() const noexcept {
        return std::get_if<DualCurveService>(&repr_);
    }
    const SpectralMatrix* as_spectral() const noexcept {
        return std::get_if<SpectralMatrix>(&repr_);
    }

private:
    std::variant<DualCurveService, SpectralMatrix,
                 std::shared_ptr<const oracle::TabulatedService>>
        repr_;
};

/// One flow's live state plus the frozen attach-time snapshot that all
/// post-run verification measures against.
struct FlowState {
    FlowService service;
    i64 backlog = 0;
    std::deque<std::pair<i64, i64>> fifo; ///< (arrival slot, count), run-length form
    std::vector<i64> cum_arrivals;        ///< realized, index = slots since attach
    std::vector<i64> cum_departures;
    i64 attach_slot = 0;
    FlowService initial_service;
    i64 initial_backlog = 0;

    FlowState(FlowService svc, i64 b, i64 attach);
};

/// Everything recorded about one slot; the run log is the sequence of these.
struct SlotReport {
    i64 slot = 0;
    i64 mu = 0;
    std::vector<i64> arrivals;
    std::vector<i64> queue;
    std::vector<i64> schedule;
    std::vector<i64> backlogs;  ///< after service
    std::vector<i64> immediate; ///< per-flow requirement p this slot
    std::vector<int> degraded;  ///< flows served below p this slot
    bool feasible = true;       ///< schedule passed the preservation test
};

struct AdmitResult {
    bool accepted = true;
    i64 i = 0, j = 0; ///< violating interval when rejected
};

struct GuaranteeAudit {
    bool pass = true;
    i64 violation_j = -1; ///< first prefix length with a service deficit
    i64 deficit = 0;
    i64 late_tasks = 0; ///< served after their guarantee slot, plus unserved overdue
};

struct BoundsRow {
    i64 max_backlog = 0;
    i64 backlog_bound = 0;
    i64 max_delay = 0;   ///< over served tasks
    i64 delay_bound = 0; ///< kBeyondHorizon when the guarantee never binds
};

class Simulator {
public:
    Simulator(i64 capacity, i64 horizon);

    /// Attach a flow before the run starts (slot 0).
    int add_flow(FlowService svc, i64 backlog);

    /// Schedulability-checked mid-run admission; the state mutates only on
    /// accept.
    AdmitResult admit(FlowService svc, i64 backlog);

    SchedResult check_schedulable() const;

    /// Advance one slot: ingest arrivals, select a schedule under the
    /// policy, update services and queues. Feasibility-claiming policies
    /// abort with internal-policy-error if their output fails the
    /// preservation test; static_split runs open-loop and records
    /// degradations instead.
    const SlotReport& step(const std::vector<i64>& arrivals, const PolicySpec& policy);

    i64 now() const noexcept { return now_; }
    i64 capacity() const noexcept { return capacity_; }
    i64 horizon() const noexcept { return horizon_; }
    int flow_count() const noexcept { return static_cast<int>(flows_.size()); }
    const std::vector<SlotReport>& log() const noexcept { return log_; }
    const FlowState& flow(int idx) const { return flows_.at(static_cast<std::size_t>(idx)); }

    /// Snapshot of the selection inputs for the current slot's queue lengths.
    SystemView view(const std::vector<i64>& queue) const;

    /// Pointwise check of realized departures against the attach-time
    /// service evaluated at the realized queued arrivals.
    GuaranteeAudit verify_guarantee(int flow) const;

    /// Realized maxima and their analytic bounds from the attach-time state.
    BoundsRow bounds_report(int flow) const;

    /// Per-flow conservation: arrivals + initial backlog = departures + final
    /// backlog.
    bool conservation_holds() const;

    /// Cross-check one slot's schedule against the exhaustive feasible set;
    /// throws oracle-too-large beyond tiny scale.
    bool oracle_accepts(const std::vector<i64>& queue, const std::vector<i64>& schedule) const;

private:
    struct Pending {
        std::vector<i64> queue;
    };

    i64 capacity_ = 0;
    i64 horizon_ = 0;
    i64 now_ = 0;
    std::vector<FlowState> flows_;
    std::vector<SlotReport> log_;
};

/// Service designed to keep every conforming flow's backlog within bound:
/// the arrival envelope is a (burst, rate) token bucket on top of the initial
/// backlog. Throws infeasible-design when no capacity-c server could honor
/// it.
DualCurveService design_backlog_service(i64 bound, i64 env_burst, i64 env_rate, i64 backlog,
                                        i64 capacity, i64 horizon);

/// Service designed to keep every conforming task's delay within bound.
DualCurveService design_delay_service(i64 bound, i64 env_burst, i64 env_rate, i64 backlog,
                                      i64 capacity, i64 horizon);

} // namespace wcsched

#pragma once

#include "wcsched/cumvec.hpp"
#include "wcsched/minplus.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

namespace wcsched {

inline constexpr int kMaxFlows = 16;
/// Above this flow count, set functions are evaluated lazily per subset
/// instead of precomputing all 2^n values.
inline constexpr int kDenseSetFnLimit = 12;

/// Integer-valued function on subsets of flows, indexed by bitmask. Memoizes
/// lazy evaluations; value semantics (copies share the memo table).
class SetFunction {
public:
    static SetFunction dense(int n, std::vector<i64> values);
    static SetFunction lazy(int n, std::function<i64(std::uint32_t)> eval);

    int flow_count() const noexcept { return n_; }
    std::uint32_t full_mask() const noexcept { return (n_ == 32 ? 0u : (1u << n_)) - 1u; }

    i64 operator()(std::uint32_t mask) const;

    /// Checks value(0) == 0 and the supermodular inequality on every subset
    /// pair; exponential, meant for tests and small n.
    bool is_supermodular() const;

private:
    SetFunction() = default;
    int n_ = 0;
    struct Memo;
    std::shared_ptr<Memo> memo_;
};

/// Exact nonnegative rational for capacity ratios; never floated.
struct Rational {
    i64 num = 0;
    i64 den = 1;

    static Rational of(i64 num, i64 den);
    friend bool operator==(const Rational&, const Rational&) = default;
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
    bool operator>(const Rational& o) const { return o < *this; }
};

/// One flow's per-slot analysis: the conditional spectrum's top row, this
/// slot's queue length, and the must-serve curve derived from them.
struct FlowView {
    CumVec cond_row0; ///< conditional spectral values over [t, t+j)
    i64 queue = 0;    ///< q for this slot
    CumVec must_serve;

    FlowView(CumVec row0, i64 q)
        : cond_row0(std::move(row0)), queue(q), must_serve(cond_row0.pointwise_min(q)) {}
};

/// Snapshot the schedule-selection machinery works from.
struct SystemView {
    std::vector<FlowView> flows;
    i64 capacity = 0;
    i64 horizon = 0;

    int flow_count() const noexcept { return static_cast<int>(flows.size()); }
};

/// Schedulability verdict with the first violating interval when negative.
struct SchedResult {
    bool schedulable = true;
    i64 i = 0, j = 0; ///< first (i, j) with the reservation sum above capacity

    explicit operator bool() const noexcept { return schedulable; }
};

/// Full-spectrum access for one flow, for the schedulability scan.
using SpectrumFn = std::function<i64(i64 i, i64 j)>;

/// Sum-of-spectra test over every interval 0 <= i < j <= horizon.
SchedResult is_schedulable(const std::vector<SpectrumFn>& spectra, i64 capacity, i64 horizon);

/// O(n*H) specialization for systems of dual-curve flows (u, v, b) triples.
struct DualFlowSpec {
    CumVec u;
    CumVec v;
    i64 b = 0;
};
SchedResult is_schedulable_dual(const std::vector<DualFlowSpec>& flows, i64 capacity);

/// Least total service owed to each subset of flows this slot. Lazy beyond
/// kDenseSetFnLimit flows. Throws not-schedulable when the view itself shows
/// the owed service for the empty set is positive.
SetFunction baseline(const SystemView& view);

/// Slice of the baseline at fixed total service mu:
/// value(mask) = max(beta(mask), mu - queue(complement)).
/// Throws infeasible-total unless beta(all) <= mu <= min(c, total queue).
SetFunction beta_mu(const SetFunction& beta, const SystemView& view, i64 mu);

/// Range of feasible totals [beta(all), min(c, total queue)].
std::pair<i64, i64> feasible_mu_range(const SetFunction& beta, const SystemView& view);

/// Vertex of the permutohedron for a priority order: rank[w] in 1..n, larger
/// rank = higher priority.
std::vector<i64> vertex(const SetFunction& beta_mu, const std::vector<int>& rank);

/// Exact vertex centroid (= Shapley value) and its deterministic integral
/// rounding, which always lies in the permutohedron.
struct Centroid {
    std::vector<Rational> exact;
    std::vector<i64> rounded;
};
Centroid shapley_centroid(const SetFunction& beta_mu);

/// Membership in the feasible polytope: valid and baseline-dominating.
bool contains(const SetFunction& beta, const std::vector<i64>& queue, i64 capacity,
              const std::vector<i64>& d);

/// Membership in the fixed-total slice.
bool contains_slice(const SetFunction& beta_mu, const std::vector<i64>& queue, i64 capacity,
                    i64 mu, const std::vector<i64>& d);

/// Equivalent O(n*H) feasibility test straight from the conditional rows:
/// valid, and for every j the next-slot row-0 reservation sum fits within
/// j*c. Agrees with contains(); used on the hot per-slot path.
bool feasible_fast(const SystemView& view, const std::vector<i64>& d);

/// Sampling of beta_mu on the algebra generated by a partition of flows.
/// classes[k] is the flow mask of class k; masks must tile the flow set.
SetFunction per_class_beta(const SetFunction& beta_mu, const std::vector<std::uint32_t>& classes,
                           int flow_count);

/// Capacity requirement of a flow subset and the system's multiplexing gains.
struct GainReport {
    std::vector<std::pair<std::uint32_t, Rational>> rho; ///< per reported subset
    Rational eta;                                        ///< >= 1
    std::optional<Rational> eta_partition;               ///< when a partition is given
};
GainReport multiplexing_gain(const std::vector<SpectrumFn>& spectra, i64 horizon,
                             std::optional<std::vector<std::uint32_t>> partition,
                             bool full_table);

} // namespace wcsched

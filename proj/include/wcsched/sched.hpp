#pragma once

#include "wcsched/feasible.hpp"

#include <string>
#include <vector>

namespace wcsched {

/// Per-flow service amounts selected for one slot.
struct Schedule {
    std::vector<i64> d;
    i64 slot = -1;
};

enum class MuRule { work_conserving, baseline, fixed };

enum class PolicyKind {
    max_slack,
    per_class_max_slack,
    edf,
    priority,
    fair,
    baseline_excess,
    static_split,
};

enum class ClassRule { priority, fair };

/// Parsed schedule-selection policy. Parameter fields are meaningful only for
/// the kinds that use them; parse_policy rejects inconsistent combinations.
struct PolicySpec {
    PolicyKind kind = PolicyKind::fair;
    MuRule mu_rule = MuRule::work_conserving;
    i64 fixed_mu = 0;
    std::vector<int> rank;                ///< priority: rank[w] in 1..n, larger = higher
    std::vector<std::uint32_t> classes;   ///< per_class: flow masks tiling the system
    ClassRule class_rule = ClassRule::fair;
    std::vector<int> class_rank;          ///< per_class priority order over classes
    std::vector<i64> split;               ///< static_split: fixed per-flow amounts
    std::vector<i64> weights;             ///< baseline_excess: round-robin weights

    static const char* kind_name(PolicyKind k) noexcept;
};

/// Max-slack schedule under total mu: confined to the must-serve hypercuboid
/// located by the staircase, residual spread in ascending flow order.
std::vector<i64> max_slack(const SystemView& view, i64 mu);

/// Per-class max-slack: class k serves exactly nu[k], max-slack within.
std::vector<i64> per_class_max_slack(const SystemView& view,
                                     const std::vector<std::uint32_t>& classes,
                                     const std::vector<i64>& nu);

/// Earliest-deadline-first over the queued tasks' guarantee deadlines. Only
/// meaningful for dual-curve systems (callers enforce the service kind).
/// Ties broken by flow index, FIFO within a flow.
std::vector<i64> edf(const SystemView& view, i64 mu);

/// Vertex of the fixed-total slice for a strict priority order.
std::vector<i64> priority_vertex(const SetFunction& beta_mu, const std::vector<int>& rank);

/// Rounded vertex centroid of the fixed-total slice.
std::vector<i64> fair(const SetFunction& beta_mu);

/// base plus excess capacity c - beta(all), handed out by integer-weighted
/// round-robin subject to the per-flow queue caps. base must lie in the
/// baseline permutohedron.
std::vector<i64> baseline_excess(const SetFunction& beta, const SystemView& view,
                                 const std::vector<i64>& base, const std::vector<i64>& weights);

/// Resolve the slot total under the policy's mu rule.
i64 resolve_mu(const PolicySpec& spec, const SystemView& view, const SetFunction& beta);

} // namespace wcsched

#include "wcsched/sched.hpp"

#include <algorithm>
#include <numeric>

namespace wcsched {

const char* PolicySpec::kind_name(PolicyKind k) noexcept {
    switch (k) {
        case PolicyKind::max_slack: return "max_slack";
        case PolicyKind::per_class_max_slack: return "per_class_max_slack";
        case PolicyKind::edf: return "edf";
        case PolicyKind::priority: return "priority";
        case PolicyKind::fair: return "fair";
        case PolicyKind::baseline_excess: return "baseline_excess";
        case PolicyKind::static_split: return "static_split";
    }
    return "unknown";
}

namespace {

i64 total_queue(const SystemView& view) {
    i64 s = 0;
    for (const auto& f : view.flows) s += f.queue;
    return s;
}

/// Fill `out` for the flows selected by `idx`: start from the hypercuboid
/// floor at staircase position `jm` and hand the residual out in ascending
/// flow order up to each flow's ceiling.
void fill_hypercuboid(const SystemView& view, const std::vector<int>& idx, i64 nu, i64 jm,
                      std::vector<i64>& out) {
    i64 rem = nu;
    std::vector<i64> upper(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const FlowView& f = view.flows[static_cast<std::size_t>(idx[k])];
        i64 lo, hi;
        if (is_beyond(jm)) {
            lo = f.must_serve.tail();
            hi = f.queue;
        } else {
            lo = f.must_serve[jm];
            hi = f.must_serve[jm + 1];
        }
        out[static_cast<std::size_t>(idx[k])] = lo;
        upper[k] = hi;
        rem -= lo;
    }
    if (rem < 0)
        raise(Errc::internal_policy_error, "staircase floor above the requested total");
    for (std::size_t k = 0; k < idx.size() && rem > 0; ++k) {
        const i64 room = upper[k] - out[static_cast<std::size_t>(idx[k])];
        const i64 take = std::min(rem, room);
        out[static_cast<std::size_t>(idx[k])] += take;
        rem -= take;
    }
    if (rem != 0)
        raise(Errc::internal_policy_error, "staircase ceiling below the requested total");
}

} // namespace

std::vector<i64> max_slack(const SystemView& view, i64 mu) {
    const int n = view.flow_count();
    if (mu < 0 || mu > total_queue(view))
        raise(Errc::no_max_slack_schedule, "total exceeds the queued workload");
    std::vector<i64> d(static_cast<std::size_t>(n), 0);
    if (n == 0) {
        if (mu != 0) raise(Errc::no_max_slack_schedule, "no flows to serve");
        return d;
    }
    std::vector<CumVec> ps;
    ps.reserve(static_cast<std::size_t>(n));
    for (const auto& f : view.flows) ps.push_back(f.must_serve);
    const CumVec psum = sum_vecs(ps);
    const i64 jm = psum.slot_of(mu + 1);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    fill_hypercuboid(view, idx, mu, jm, d);
    return d;
}

std::vector<i64> per_class_max_slack(const SystemView& view,
                                     const std::vector<std::uint32_t>& classes,
                                     const std::vector<i64>& nu) {
    const int n = view.flow_count();
    if (classes.size() != nu.size())
        raise(Errc::invalid_argument, "per-class totals must match the class count");
    std::vector<i64> d(static_cast<std::size_t>(n), 0);
    std::uint32_t seen = 0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const std::uint32_t cls = classes[k];
        if (cls == 0 || (seen & cls) != 0)
            raise(Errc::invalid_argument, "classes must be nonempty and disjoint");
        seen |= cls;
        std::vector<int> idx;
        std::vector<CumVec> ps;
        i64 qsum = 0;
        for (int wi = 0; wi < n; ++wi) {
            if (!(cls & (1u << wi))) continue;
            idx.push_back(wi);
            ps.push_back(view.flows[static_cast<std::size_t>(wi)].must_serve);
            qsum += view.flows[static_cast<std::size_t>(wi)].queue;
        }
        if (nu[k] < 0 || nu[k] > qsum)
            raise(Errc::no_schedule, "class total exceeds its queued workload");
        const CumVec psum = sum_vecs(ps);
        fill_hypercuboid(view, idx, nu[k], psum.slot_of(nu[k] + 1), d);
    }
    const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
    if (seen != full) raise(Errc::invalid_argument, "classes must cover every flow");
    return d;
}

std::vector<i64> edf(const SystemView& view, i64 mu) {
    const int n = view.flow_count();
    if (mu < 0 || mu > total_queue(view))
        raise(Errc::no_max_slack_schedule, "total exceeds the queued workload");
    std::vector<i64> d(static_cast<std::size_t>(n), 0);
    i64 rem = mu;
    // Tasks with deadline offset j from flow w number must_serve[j+1] -
    // must_serve[j]; sweep deadlines in order, flows by index within a
    // deadline, FIFO within a flow.
    for (i64 j = 0; j < view.horizon && rem > 0; ++j) {
        for (int wi = 0; wi < n && rem > 0; ++wi) {
            const FlowView& f = view.flows[static_cast<std::size_t>(wi)];
            const i64 due = f.must_serve[j + 1] - d[static_cast<std::size_t>(wi)];
            if (due <= 0) continue;
            const i64 take = std::min(rem, due);
            d[static_cast<std::size_t>(wi)] += take;
            rem -= take;
        }
    }
    for (int wi = 0; wi < n && rem > 0; ++wi) {
        const FlowView& f = view.flows[static_cast<std::size_t>(wi)];
        const i64 room = f.queue - d[static_cast<std::size_t>(wi)];
        const i64 take = std::min(rem, room);
        d[static_cast<std::size_t>(wi)] += take;
        rem -= take;
    }
    return d;
}

std::vector<i64> priority_vertex(const SetFunction& bmu, const std::vector<int>& rank) {
    return vertex(bmu, rank);
}

std::vector<i64> fair(const SetFunction& bmu) { return shapley_centroid(bmu).rounded; }

std::vector<i64> baseline_excess(const SetFunction& beta, const SystemView& view,
                                 const std::vector<i64>& base,
                                 const std::vector<i64>& weights) {
    const int n = view.flow_count();
    if (static_cast<int>(base.size()) != n || static_cast<int>(weights.size()) != n)
        raise(Errc::invalid_argument, "base and weights must cover every flow");
    std::vector<i64> queue(static_cast<std::size_t>(n));
    i64 base_total = 0;
    for (int wi = 0; wi < n; ++wi) {
        queue[static_cast<std::size_t>(wi)] = view.flows[static_cast<std::size_t>(wi)].queue;
        if (weights[static_cast<std::size_t>(wi)] < 0)
            raise(Errc::invalid_argument, "weights must be >= 0");
        base_total += base[static_cast<std::size_t>(wi)];
    }
    if (base_total != beta(beta.full_mask()) || !contains(beta, queue, view.capacity, base))
        raise(Errc::invalid_base, "base point is not in the baseline permutohedron");

    std::vector<i64> d = base;
    i64 excess = view.capacity - base_total;
    // Weighted round-robin over the excess, each flow capped by its queue.
    bool progress = true;
    while (excess > 0 && progress) {
        progress = false;
        for (int wi = 0; wi < n && excess > 0; ++wi) {
            const i64 room = queue[static_cast<std::size_t>(wi)] - d[static_cast<std::size_t>(wi)];
            const i64 take = std::min({weights[static_cast<std::size_t>(wi)], room, excess});
            if (take > 0) {
                d[static_cast<std::size_t>(wi)] += take;
                excess -= take;
                progress = true;
            }
        }
    }
    return d;
}

i64 resolve_mu(const PolicySpec& spec, const SystemView& view, const SetFunction& beta) {
    switch (spec.mu_rule) {
        case MuRule::work_conserving: return std::min(view.capacity, total_queue(view));
        case MuRule::baseline: return beta(beta.full_mask());
        case MuRule::fixed: return spec.fixed_mu;
    }
    return 0;
}

} // namespace wcsched

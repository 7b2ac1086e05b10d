#include "wcsched/sim.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace wcsched {

namespace {

CumVec extend(const CumVec& x, i64 new_h) {
    if (new_h <= x.horizon()) return x;
    std::vector<i64> e(x.entries().begin(), x.entries().end());
    e.resize(static_cast<std::size_t>(new_h) + 1, x.tail());
    return CumVec(std::move(e));
}

} // namespace

// ---------------------------------------------------------------------------
// FlowService

FlowService::Kind FlowService::kind() const noexcept {
    if (std::holds_alternative<DualCurveService>(repr_)) return Kind::dual_curve;
    if (std::holds_alternative<SpectralMatrix>(repr_)) return Kind::spectral;
    return Kind::tabulated;
}

i64 FlowService::horizon() const {
    if (const auto* dc = std::get_if<DualCurveService>(&repr_)) return dc->horizon();
    if (const auto* sm = std::get_if<SpectralMatrix>(&repr_)) return sm->horizon();
    return std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_)->horizon();
}

CumVec FlowService::cond_row0(i64 q1, i64 sys_horizon) const {
    if (const auto* dc = std::get_if<DualCurveService>(&repr_))
        return extend(conditioned_dynamic(*dc, q1), sys_horizon);
    if (const auto* sm = std::get_if<SpectralMatrix>(&repr_))
        return extend(conditional_row0(*sm, q1), sys_horizon);
    const auto& tab = *std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_);
    auto grid = oracle::brute_conditional_spectrum(tab, q1);
    return extend(CumVec(std::move(grid[0])), sys_horizon);
}

i64 FlowService::immediate(i64 q1) const {
    if (const auto* dc = std::get_if<DualCurveService>(&repr_))
        return immediate_requirement(*dc, q1);
    if (const auto* sm = std::get_if<SpectralMatrix>(&repr_))
        return immediate_requirement(*sm, q1);
    return oracle::brute_immediate(*std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_),
                                   q1);
}

void FlowService::update(i64 q1, i64 d, bool allow_degraded) {
    if (auto* dc = std::get_if<DualCurveService>(&repr_)) {
        *dc = allow_degraded ? update_dual_degraded(*dc, q1, d) : update_dual(*dc, q1, d);
        return;
    }
    if (auto* sm = std::get_if<SpectralMatrix>(&repr_)) {
        *sm = allow_degraded ? update_spectral_degraded(*sm, q1, d) : update_spectral(*sm, q1, d);
        return;
    }
    auto& tab = std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_);
    // The table form has no degraded variant; under-service raises.
    tab = std::make_shared<const oracle::TabulatedService>(oracle::brute_update(*tab, q1, d));
}

SpectrumFn FlowService::spectrum(i64 backlog) const {
    if (const auto* dc = std::get_if<DualCurveService>(&repr_)) {
        const CumVec u = dc->dynamic_curve;
        const CumVec v = dc->static_curve;
        return [u, v, backlog](i64 i, i64 j) -> i64 {
            if (i >= j) return 0;
            if (i == 0) return u[j];
            return std::min(std::max<i64>(u[j] - backlog, 0), v[j - i]);
        };
    }
    if (const auto* sm = std::get_if<SpectralMatrix>(&repr_)) {
        auto m = std::make_shared<SpectralMatrix>(*sm);
        return [m](i64 i, i64 j) -> i64 {
            if (i >= j) return 0;
            const i64 h = m->horizon();
            if (i > h) return 0;
            return m->at(i, std::min(j, h));
        };
    }
    const auto& tab = std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_);
    auto grid = std::make_shared<oracle::Grid>(oracle::brute_spectrum(*tab));
    const i64 h = tab->horizon();
    return [grid, h](i64 i, i64 j) -> i64 {
        if (i >= j || i > h) return 0;
        return (*grid)[static_cast<std::size_t>(i)][static_cast<std::size_t>(std::min(j, h))];
    };
}

CumVec FlowService::eval(const CumVec& q, i64 backlog) const {
    (void)backlog;
    const i64 L = q.horizon();
    auto truncate = [L](const CumVec& x) {
        if (x.horizon() == L) return x;
        std::vector<i64> e(x.entries().begin(), x.entries().begin() + L + 1);
        return CumVec(std::move(e));
    };
    if (const auto* dc = std::get_if<DualCurveService>(&repr_)) {
        const i64 h = std::max(L, dc->horizon());
        return truncate(eval_dual(DualCurveService(extend(dc->dynamic_curve, h),
                                                   extend(dc->static_curve, h)),
                                  extend(q, h)));
    }
    if (const auto* sm = std::get_if<SpectralMatrix>(&repr_)) {
        const i64 h = sm->horizon();
        std::vector<i64> out(static_cast<std::size_t>(L) + 1, 0);
        for (i64 j = 1; j <= L; ++j) {
            const i64 jc = std::min(j, h);
            i64 best = sm->at(0, jc); // i = 0 term
            for (i64 i = 1; i <= jc; ++i) best = std::min(best, q[i] + sm->at(i, jc));
            if (j > h) best = std::min(best, q[h + 1]); // zero rows past the horizon
            out[static_cast<std::size_t>(j)] = best;
        }
        return CumVec(std::move(out));
    }
    const auto& tab = *std::get<std::shared_ptr<const oracle::TabulatedService>>(repr_);
    if (L > tab.horizon())
        raise(Errc::invalid_argument, "run outlived the tabulated service's horizon");
    return truncate(tab.eval(extend(q, tab.horizon())));
}

// ---------------------------------------------------------------------------
// FlowState / Simulator

FlowState::FlowState(FlowService svc, i64 b, i64 attach)
    : service(svc),
      backlog(b),
      attach_slot(attach),
      initial_service(std::move(svc)),
      initial_backlog(b) {
    if (b < 0) raise(Errc::invalid_argument, "backlog must be >= 0");
    if (b > 0) fifo.emplace_back(attach, b);
    cum_arrivals.push_back(0);
    cum_departures.push_back(0);
}

Simulator::Simulator(i64 capacity, i64 horizon) : capacity_(capacity), horizon_(horizon) {
    if (capacity < 0) raise(Errc::invalid_argument, "capacity must be >= 0");
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
}

int Simulator::add_flow(FlowService svc, i64 backlog) {
    if (now_ != 0) raise(Errc::invalid_argument, "add_flow only before the run; use admit()");
    if (const auto* sm = svc.as_spectral(); sm && sm->backlog() != backlog)
        raise(Errc::invalid_argument, "spectral matrix backlog disagrees with the flow's");
    flows_.emplace_back(std::move(svc), backlog, now_);
    return static_cast<int>(flows_.size()) - 1;
}

SchedResult Simulator::check_schedulable() const {
    bool all_dual = true;
    for (const auto& f : flows_)
        if (f.service.kind() != FlowService::Kind::dual_curve) all_dual = false;
    if (all_dual) {
        std::vector<DualFlowSpec> specs;
        specs.reserve(flows_.size());
        for (const auto& f : flows_) {
            const auto* dc = f.service.as_dual();
            specs.push_back(DualFlowSpec{extend(dc->dynamic_curve, horizon_),
                                         extend(dc->static_curve, horizon_), f.backlog});
        }
        return is_schedulable_dual(specs, capacity_);
    }
    std::vector<SpectrumFn> spectra;
    spectra.reserve(flows_.size());
    for (const auto& f : flows_) spectra.push_back(f.service.spectrum(f.backlog));
    return is_schedulable(spectra, capacity_, horizon_);
}

AdmitResult Simulator::admit(FlowService svc, i64 backlog) {
    if (const auto* sm = svc.as_spectral(); sm && sm->backlog() != backlog)
        raise(Errc::invalid_argument, "spectral matrix backlog disagrees with the flow's");
    std::vector<SpectrumFn> spectra;
    spectra.reserve(flows_.size() + 1);
    for (const auto& f : flows_) spectra.push_back(f.service.spectrum(f.backlog));
    spectra.push_back(svc.spectrum(backlog));
    SchedResult r = is_schedulable(spectra, capacity_, horizon_);
    if (!r) return AdmitResult{false, r.i, r.j};
    flows_.emplace_back(std::move(svc), backlog, now_);
    return AdmitResult{};
}

SystemView Simulator::view(const std::vector<i64>& queue) const {
    SystemView v;
    v.capacity = capacity_;
    v.horizon = horizon_;
    v.flows.reserve(flows_.size());
    for (std::size_t w = 0; w < flows_.size(); ++w)
        v.flows.emplace_back(flows_[w].service.cond_row0(queue[w], horizon_), queue[w]);
    return v;
}

const SlotReport& Simulator::step(const std::vector<i64>& arrivals, const PolicySpec& policy) {
    const std::size_t n = flows_.size();
    if (arrivals.size() != n) raise(Errc::invalid_argument, "arrival vector size mismatch");
    const bool open_loop = policy.kind == PolicyKind::static_split;

    SchedResult pre = check_schedulable();
    if (!pre && !open_loop)
        raise(Errc::not_schedulable, "state unschedulable at slot " + std::to_string(now_) +
                                         " interval (" + std::to_string(pre.i) + ", " +
                                         std::to_string(pre.j) + ")");

    SlotReport rep;
    rep.slot = now_;
    rep.arrivals = arrivals;
    rep.queue.resize(n);
    rep.immediate.resize(n);
    for (std::size_t w = 0; w < n; ++w) {
        if (arrivals[w] < 0) raise(Errc::invalid_argument, "arrivals must be >= 0");
        rep.queue[w] = flows_[w].backlog + arrivals[w];
        rep.immediate[w] = flows_[w].service.immediate(rep.queue[w]);
    }

    SystemView sv = view(rep.queue);

    // Select the schedule.
    std::vector<i64> d(n, 0);
    if (open_loop) {
        if (policy.split.size() != n)
            raise(Errc::invalid_argument, "static split must cover every flow");
        for (std::size_t w = 0; w < n; ++w)
            d[w] = std::min(policy.split[w], rep.queue[w]);
    } else {
        std::optional<SetFunction> beta_fn;
        auto need_beta = [&]() -> const SetFunction& {
            if (!beta_fn) beta_fn = baseline(sv);
            return *beta_fn;
        };
        i64 mu;
        if (policy.mu_rule == MuRule::work_conserving && policy.kind != PolicyKind::priority &&
            policy.kind != PolicyKind::fair && policy.kind != PolicyKind::per_class_max_slack) {
            i64 tq = 0;
            for (i64 q : rep.queue) tq += q;
            mu = std::min(capacity_, tq); // always feasible given a schedulable state
        } else {
            mu = resolve_mu(policy, sv, need_beta());
        }
        switch (policy.kind) {
            case PolicyKind::max_slack: d = max_slack(sv, mu); break;
            case PolicyKind::edf: {
                for (const auto& f : flows_)
                    if (f.service.kind() != FlowService::Kind::dual_curve)
                        raise(Errc::unsupported_service_kind,
                              "edf needs dual-curve flows; deadlines are not realization-"
                              "independent otherwise");
                d = edf(sv, mu);
                break;
            }
            case PolicyKind::priority: {
                d = priority_vertex(beta_mu(need_beta(), sv, mu), policy.rank);
                break;
            }
            case PolicyKind::fair: {
                d = fair(beta_mu(need_beta(), sv, mu));
                break;
            }
            case PolicyKind::per_class_max_slack: {
                SetFunction bmu = beta_mu(need_beta(), sv, mu);
                SetFunction bp = per_class_beta(bmu, policy.classes, static_cast<int>(n));
                std::vector<i64> nu;
                if (policy.class_rule == ClassRule::priority)
                    nu = vertex(bp, policy.class_rank);
                else
                    nu = shapley_centroid(bp).rounded;
                d = per_class_max_slack(sv, policy.classes, nu);
                break;
            }
            case PolicyKind::baseline_excess: {
                const SetFunction& b = need_beta();
                SetFunction base_slice = beta_mu(b, sv, b(b.full_mask()));
                std::vector<i64> base = shapley_centroid(base_slice).rounded;
                d = baseline_excess(b, sv, base, policy.weights);
                break;
            }
            case PolicyKind::static_split: break; // handled above
        }
    }

    rep.schedule = d;
    rep.mu = std::accumulate(d.begin(), d.end(), i64{0});
    rep.feasible = pre.schedulable && feasible_fast(sv, d);
    if (!rep.feasible && !open_loop)
        raise(Errc::internal_policy_error,
              std::string("policy ") + PolicySpec::kind_name(policy.kind) +
                  " produced an infeasible schedule at slot " + std::to_string(now_));

    // Commit: queues, services, realized traces.
    for (std::size_t w = 0; w < n; ++w) {
        FlowState& f = flows_[w];
        if (arrivals[w] > 0) f.fifo.emplace_back(now_, arrivals[w]);
        const bool degraded = d[w] < rep.immediate[w];
        if (degraded) rep.degraded.push_back(static_cast<int>(w));
        f.service.update(rep.queue[w], d[w], open_loop);
        f.backlog = rep.queue[w] - d[w];
        i64 left = d[w];
        while (left > 0) {
            assert(!f.fifo.empty());
            auto& [slot, count] = f.fifo.front();
            const i64 take = std::min(left, count);
            count -= take;
            left -= take;
            if (count == 0) f.fifo.pop_front();
        }
        i64 qlen = 0;
        for (const auto& [slot, count] : f.fifo) qlen += count;
        assert(qlen == f.backlog);
        f.cum_arrivals.push_back(f.cum_arrivals.back() + arrivals[w]);
        f.cum_departures.push_back(f.cum_departures.back() + d[w]);
        rep.backlogs.push_back(f.backlog);
    }
    ++now_;
    log_.push_back(std::move(rep));
    return log_.back();
}

// ---------------------------------------------------------------------------
// Post-run audits

namespace {

struct Realized {
    CumVec q;
    CumVec d;
    i64 len;
};

std::optional<Realized> realized_traces(const FlowState& f) {
    const i64 len = static_cast<i64>(f.cum_arrivals.size()) - 1;
    if (len < 1) return std::nullopt;
    std::vector<i64> qe(static_cast<std::size_t>(len) + 1, 0);
    std::vector<i64> de(static_cast<std::size_t>(len) + 1, 0);
    for (i64 j = 1; j <= len; ++j) {
        qe[static_cast<std::size_t>(j)] =
            f.initial_backlog + f.cum_arrivals[static_cast<std::size_t>(j)];
        de[static_cast<std::size_t>(j)] = f.cum_departures[static_cast<std::size_t>(j)];
    }
    return Realized{CumVec(std::move(qe)), CumVec(std::move(de)), len};
}

} // namespace

GuaranteeAudit Simulator::verify_guarantee(int flow) const {
    const FlowState& f = flows_.at(static_cast<std::size_t>(flow));
    GuaranteeAudit audit;
    auto traces = realized_traces(f);
    if (!traces) return audit;
    const CumVec psi = f.initial_service.eval(traces->q, f.initial_backlog);
    for (i64 j = 1; j <= traces->len; ++j) {
        if (traces->d[j] < psi[j]) {
            audit.pass = false;
            audit.violation_j = j;
            audit.deficit = psi[j] - traces->d[j];
            break;
        }
    }
    // Tasks served later than the guarantee slot (or still unserved past it).
    const i64 due = psi[traces->len];
    for (i64 h = 1; h <= due; ++h) {
        const i64 deadline = psi.slot_of(h);
        const i64 served = traces->d.slot_of(h);
        if (served > deadline) ++audit.late_tasks;
    }
    return audit;
}

BoundsRow Simulator::bounds_report(int flow) const {
    const FlowState& f = flows_.at(static_cast<std::size_t>(flow));
    BoundsRow row;
    auto traces = realized_traces(f);
    if (!traces) return row;
    const CumVec psi = f.initial_service.eval(traces->q, f.initial_backlog);
    for (i64 j = 1; j <= traces->len; ++j) {
        row.max_backlog = std::max(row.max_backlog, traces->q[j] - traces->d[j]);
        row.backlog_bound = std::max(row.backlog_bound, traces->q[j] - psi[j]);
    }
    const i64 served = traces->d[traces->len];
    for (i64 h = 1; h <= served; ++h)
        row.max_delay = std::max(row.max_delay, traces->d.slot_of(h) - traces->q.slot_of(h));
    for (i64 h = 1; h <= traces->q[traces->len]; ++h) {
        const i64 deadline = psi.slot_of(h);
        if (is_beyond(deadline)) {
            row.delay_bound = kBeyondHorizon;
            break;
        }
        row.delay_bound = std::max(row.delay_bound, deadline - traces->q.slot_of(h));
    }
    return row;
}

bool Simulator::conservation_holds() const {
    for (const auto& f : flows_) {
        if (f.initial_backlog + f.cum_arrivals.back() != f.cum_departures.back() + f.backlog)
            return false;
    }
    return true;
}

bool Simulator::oracle_accepts(const std::vector<i64>& queue,
                               const std::vector<i64>& schedule) const {
    const std::size_t n = flows_.size();
    if (n > 3 || capacity_ > 4 || horizon_ > 4)
        raise(Errc::oracle_too_large, "oracle cross-check wants n <= 3, c <= 4, H <= 4");
    std::vector<oracle::TabulatedService> tabs;
    tabs.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        const FlowState& f = flows_[w];
        i64 mx = 0;
        SpectrumFn lam = f.service.spectrum(f.backlog);
        for (i64 i = 0; i < horizon_; ++i)
            for (i64 j = i + 1; j <= horizon_; ++j) mx = std::max(mx, lam(i, j));
        const i64 cap = queue[w] + mx + f.backlog + 1;
        const FlowService& svc = f.service;
        const i64 b = f.backlog;
        tabs.push_back(oracle::TabulatedService::tabulate(
            [&svc, b](const CumVec& q) { return svc.eval(q, b); }, b, horizon_, cap));
    }
    auto feasible = oracle::brute_feasible_set(tabs, queue, capacity_);
    return std::find(feasible.begin(), feasible.end(), schedule) != feasible.end();
}

// ---------------------------------------------------------------------------
// Bound-designed services

namespace {

i64 ceil_div(i64 a, i64 b) { return (a + b - 1) / b; }

CumVec envelope_curve(i64 backlog, i64 burst, i64 rate, i64 horizon) {
    std::vector<i64> e(static_cast<std::size_t>(horizon) + 1, 0);
    for (i64 j = 1; j <= horizon; ++j)
        e[static_cast<std::size_t>(j)] = backlog + burst + rate * j;
    return CumVec(std::move(e));
}

void check_designable(const DualCurveService& svc, i64 backlog, i64 capacity) {
    SchedResult r =
        is_schedulable_dual({DualFlowSpec{svc.dynamic_curve, svc.static_curve, backlog}}, capacity);
    if (!r)
        raise(Errc::infeasible_design, "envelope incompatible with the bound at capacity " +
                                           std::to_string(capacity));
}

} // namespace

DualCurveService design_backlog_service(i64 bound, i64 env_burst, i64 env_rate, i64 backlog,
                                        i64 capacity, i64 horizon) {
    if (bound < 0 || env_burst < 0 || env_rate < 0 || backlog < 0)
        raise(Errc::invalid_argument, "design parameters must be >= 0");
    CumVec u = envelope_curve(backlog, env_burst, env_rate, horizon).clip_sub(bound);
    const i64 rate = env_rate + std::max<i64>(env_burst - bound, 0);
    DualCurveService svc(std::move(u), CumVec::constant_rate(rate, horizon));
    check_designable(svc, backlog, capacity);
    return svc;
}

DualCurveService design_delay_service(i64 bound, i64 env_burst, i64 env_rate, i64 backlog,
                                      i64 capacity, i64 horizon) {
    if (bound < 0 || env_burst < 0 || env_rate < 0 || backlog < 0)
        raise(Errc::invalid_argument, "design parameters must be >= 0");
    CumVec u = envelope_curve(backlog, env_burst, env_rate, horizon).shift_right(bound);
    CumVec v = CumVec::zeros(horizon);
    if (env_burst == 0) {
        v = rate_latency_curve(env_rate, bound, 0, horizon);
    } else {
        if (bound == 0) {
            // Everything must depart on arrival; the static curve must
            // dominate every window of the envelope.
            v = envelope_curve(0, env_burst, env_rate, horizon);
        } else {
            v = CumVec::constant_rate(std::max(env_rate, ceil_div(env_burst, bound)), horizon);
        }
    }
    DualCurveService svc(std::move(u), std::move(v));
    check_designable(svc, backlog, capacity);
    return svc;
}

} // namespace wcsched

#include "wcsched/scenario.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wcsched {

using ordered_json = nlohmann::ordered_json;

namespace {

i64 horizon_cap_from_env() {
    if (const char* env = std::getenv("WCSCHED_HORIZON_MAX")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<i64>(v);
        raise(Errc::parse_error, "WCSCHED_HORIZON_MAX must be a positive integer");
    }
    return 4096;
}

[[noreturn]] void bad(const std::string& what) { raise(Errc::parse_error, what); }

void expect_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                 const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) bad(std::string("unknown field \"") + it.key() + "\" in " + where);
    }
}

i64 get_int(const ordered_json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        bad(std::string("missing integer field \"") + key + "\"");
    return obj[key].get<i64>();
}

CumVec parse_curve(const ordered_json& j, i64 horizon) {
    if (j.is_array()) {
        std::vector<i64> e;
        for (const auto& x : j) {
            if (!x.is_number_integer()) bad("curve entries must be integers");
            e.push_back(x.get<i64>());
        }
        if (static_cast<i64>(e.size()) != horizon + 1)
            bad("curve must have horizon+1 entries (" + std::to_string(horizon + 1) + ")");
        return CumVec(std::move(e));
    }
    if (j.is_object() && j.contains("segments")) {
        expect_keys(j, {"segments", "offset"}, "piecewise curve");
        std::vector<std::pair<i64, i64>> segs;
        for (const auto& s : j["segments"]) {
            if (!s.is_array() || s.size() != 2) bad("segments are [length, rate] pairs");
            segs.emplace_back(s[0].get<i64>(), s[1].get<i64>());
        }
        const i64 offset = j.contains("offset") ? j["offset"].get<i64>() : 0;
        return CumVec::piecewise(offset, segs, horizon);
    }
    if (j.is_object() && j.contains("step")) {
        expect_keys(j, {"step"}, "step curve");
        const auto& s = j["step"];
        expect_keys(s, {"count", "at"}, "step curve");
        return CumVec::step(get_int(s, "count"), get_int(s, "at"), horizon);
    }
    bad("curve must be an array, {segments, offset}, or {step}");
}

FlowService parse_service(const ordered_json& j, i64 horizon, i64 flow_backlog) {
    if (!j.is_object()) bad("service must be an object");
    if (j.contains("u") || j.contains("v")) {
        expect_keys(j, {"u", "v"}, "dual-curve service");
        if (!j.contains("u") || !j.contains("v")) bad("dual-curve service needs u and v");
        return FlowService(
            DualCurveService(parse_curve(j["u"], horizon), parse_curve(j["v"], horizon)));
    }
    if (j.contains("s")) {
        expect_keys(j, {"s", "b", "h"}, "spectral service");
        const i64 b = j.contains("b") ? get_int(j, "b") : flow_backlog;
        const i64 h = j.contains("h") ? get_int(j, "h") : horizon;
        if (h != horizon) bad("spectral service horizon must match the scenario horizon");
        std::vector<std::vector<i64>> rows;
        for (const auto& r : j["s"]) {
            std::vector<i64> row;
            for (const auto& x : r) row.push_back(x.get<i64>());
            rows.push_back(std::move(row));
        }
        return FlowService(SpectralMatrix(b, std::move(rows)));
    }
    bad("service must carry either {u, v} curves or a spectral matrix {s, b, h}");
}

FlowSpec parse_flow(const ordered_json& j, i64 horizon) {
    expect_keys(j, {"service", "b"}, "flow");
    if (!j.contains("service")) bad("flow needs a service");
    const i64 b = j.contains("b") ? get_int(j, "b") : 0;
    if (b < 0) bad("flow backlog must be >= 0");
    return FlowSpec{parse_service(j["service"], horizon, b), b};
}

PolicyKind parse_kind(const std::string& name) {
    for (PolicyKind k : {PolicyKind::max_slack, PolicyKind::per_class_max_slack, PolicyKind::edf,
                         PolicyKind::priority, PolicyKind::fair, PolicyKind::baseline_excess,
                         PolicyKind::static_split})
        if (name == PolicySpec::kind_name(k)) return k;
    bad("unknown policy \"" + name + "\"");
}

PolicySpec parse_policy(const ordered_json& j, std::size_t flow_count) {
    if (!j.is_object() || !j.contains("policy")) bad("policy object needs a \"policy\" kind");
    PolicySpec spec;
    spec.kind = parse_kind(j["policy"].get<std::string>());
    expect_keys(j,
                {"policy", "mu", "rank", "classes", "class_rule", "class_rank", "split",
                 "weights"},
                "policy");
    if (j.contains("mu")) {
        const auto& mu = j["mu"];
        if (mu.is_string() && mu == "work_conserving") spec.mu_rule = MuRule::work_conserving;
        else if (mu.is_string() && mu == "baseline") spec.mu_rule = MuRule::baseline;
        else if (mu.is_number_integer()) {
            spec.mu_rule = MuRule::fixed;
            spec.fixed_mu = mu.get<i64>();
        } else bad("mu must be \"work_conserving\", \"baseline\", or an integer");
    }
    auto need = [&](const char* key, PolicyKind for_kind) {
        if (spec.kind == for_kind && !j.contains(key))
            bad(std::string("policy ") + PolicySpec::kind_name(for_kind) + " needs \"" + key +
                "\"");
    };
    need("rank", PolicyKind::priority);
    need("classes", PolicyKind::per_class_max_slack);
    need("split", PolicyKind::static_split);
    need("weights", PolicyKind::baseline_excess);
    if (j.contains("rank"))
        for (const auto& x : j["rank"]) spec.rank.push_back(x.get<int>());
    if (j.contains("classes")) {
        for (const auto& cls : j["classes"]) {
            std::uint32_t mask = 0;
            for (const auto& x : cls) {
                const int idx = x.get<int>();
                if (idx < 0 || idx >= static_cast<int>(flow_count)) bad("class flow index range");
                mask |= 1u << idx;
            }
            spec.classes.push_back(mask);
        }
    }
    if (j.contains("class_rule")) {
        const std::string r = j["class_rule"].get<std::string>();
        if (r == "priority") spec.class_rule = ClassRule::priority;
        else if (r == "fair") spec.class_rule = ClassRule::fair;
        else bad("class_rule must be \"priority\" or \"fair\"");
    }
    if (j.contains("class_rank"))
        for (const auto& x : j["class_rank"]) spec.class_rank.push_back(x.get<int>());
    if (spec.kind == PolicyKind::per_class_max_slack && spec.class_rule == ClassRule::priority &&
        spec.class_rank.empty())
        bad("per-class priority needs class_rank");
    if (j.contains("split"))
        for (const auto& x : j["split"]) spec.split.push_back(x.get<i64>());
    if (j.contains("weights"))
        for (const auto& x : j["weights"]) spec.weights.push_back(x.get<i64>());
    return spec;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded()) bad("scenario is not valid JSON");
    expect_keys(j,
                {"c", "horizon", "flows", "arrivals", "slots", "policy", "admissions",
                 "schedule_queries", "partition"},
                "scenario");
    Scenario sc;
    sc.capacity = get_int(j, "c");
    sc.horizon = get_int(j, "horizon");
    if (sc.capacity < 0) bad("capacity must be >= 0");
    const i64 cap = horizon_cap_from_env();
    if (sc.horizon < 1 || sc.horizon > cap)
        bad("horizon must be in [1, " + std::to_string(cap) + "] (WCSCHED_HORIZON_MAX)");
    if (j.contains("flows"))
        for (const auto& f : j["flows"]) sc.flows.push_back(parse_flow(f, sc.horizon));
    if (j.contains("arrivals")) {
        const auto& a = j["arrivals"];
        expect_keys(a, {"trace", "generator"}, "arrivals");
        if (a.contains("trace") == a.contains("generator"))
            bad("arrivals needs exactly one of trace or generator");
        if (a.contains("trace")) {
            for (const auto& row : a["trace"]) {
                std::vector<i64> r;
                for (const auto& x : row) r.push_back(x.get<i64>());
                sc.trace.push_back(std::move(r));
            }
        } else {
            const auto& g = a["generator"];
            expect_keys(g, {"seed", "slots", "max_per_slot"}, "generator");
            sc.generator = ArrivalGenerator{
                static_cast<std::uint64_t>(get_int(g, "seed")),
                get_int(g, "slots"),
                get_int(g, "max_per_slot"),
            };
            if (sc.generator->slots < 0 || sc.generator->max_per_slot < 0)
                bad("generator slots and max_per_slot must be >= 0");
        }
    }
    if (j.contains("slots")) sc.slots = get_int(j, "slots");
    if (j.contains("policy")) sc.policy = parse_policy(j["policy"], sc.flows.size());
    if (j.contains("admissions")) {
        for (const auto& ad : j["admissions"]) {
            expect_keys(ad, {"slot", "flow"}, "admission");
            sc.admissions.push_back(Admission{get_int(ad, "slot"), parse_flow(ad["flow"], sc.horizon)});
        }
    }
    if (j.contains("schedule_queries"))
        for (const auto& row : j["schedule_queries"]) {
            std::vector<i64> r;
            for (const auto& x : row) r.push_back(x.get<i64>());
            sc.schedule_queries.push_back(std::move(r));
        }
    if (j.contains("partition")) {
        std::vector<std::vector<int>> part;
        for (const auto& cls : j["partition"]) {
            std::vector<int> c;
            for (const auto& x : cls) c.push_back(x.get<int>());
            part.push_back(std::move(c));
        }
        sc.partition = std::move(part);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::parse_error, "cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

i64 run_length(const Scenario& sc) {
    if (sc.slots) return *sc.slots;
    if (sc.generator) return sc.generator->slots;
    return static_cast<i64>(sc.trace.size());
}

namespace {

ordered_json rational_json(const Rational& r) {
    return ordered_json{{"num", r.num}, {"den", r.den}};
}

ordered_json report_to_json(const SlotReport& rep) {
    ordered_json line;
    line["slot"] = rep.slot;
    line["arrivals"] = rep.arrivals;
    line["queue"] = rep.queue;
    line["schedule"] = rep.schedule;
    line["mu"] = rep.mu;
    line["backlogs"] = rep.backlogs;
    line["due_now"] = rep.immediate;
    line["feasible"] = rep.feasible;
    line["degraded"] = rep.degraded;
    return line;
}

Simulator build_simulator(const Scenario& sc) {
    Simulator sim(sc.capacity, sc.horizon);
    for (const auto& f : sc.flows) sim.add_flow(f.service, f.backlog);
    return sim;
}

std::vector<i64> arrivals_for_slot(const Scenario& sc, SplitMix64* rng, i64 slot,
                                   std::size_t flow_count) {
    std::vector<i64> a(flow_count, 0);
    if (sc.generator) {
        for (std::size_t w = 0; w < flow_count; ++w) a[w] = rng->below(sc.generator->max_per_slot);
        return a;
    }
    if (slot < static_cast<i64>(sc.trace.size())) {
        const auto& row = sc.trace[static_cast<std::size_t>(slot)];
        if (row.size() > flow_count)
            raise(Errc::parse_error, "arrival row wider than the admitted flow set at slot " +
                                         std::to_string(slot));
        std::copy(row.begin(), row.end(), a.begin());
    }
    return a;
}

} // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opts) {
    RunResult out;
    Simulator sim = build_simulator(sc);
    SplitMix64 rng{opts.seed_override ? *opts.seed_override
                                      : (sc.generator ? sc.generator->seed : 0)};
    const i64 slots = run_length(sc);

    std::ostringstream log, csv;
    csv << "slot";
    auto csv_flow_headers = [&](std::size_t n) {
        for (std::size_t w = 0; w < n; ++w)
            csv << ",backlog" << w << ",served" << w << ",due_now" << w;
        csv << "\n";
    };
    csv_flow_headers(sc.flows.size());

    std::size_t next_admission = 0;
    int exit_code = 0;
    try {
        for (i64 t = 0; t < slots; ++t) {
            while (next_admission < sc.admissions.size() &&
                   sc.admissions[next_admission].slot <= t) {
                const auto& ad = sc.admissions[next_admission];
                AdmitResult r = sim.admit(ad.flow.service, ad.flow.backlog);
                ordered_json line;
                line["slot"] = t;
                line["admission"] = next_admission;
                line["accepted"] = r.accepted;
                if (!r.accepted) line["violating_interval"] = {r.i, r.j};
                log << line.dump() << "\n";
                ++next_admission;
            }
            const auto arrivals =
                arrivals_for_slot(sc, &rng, t, static_cast<std::size_t>(sim.flow_count()));
            const SlotReport& rep = sim.step(arrivals, sc.policy);
            if (opts.oracle_check && sc.policy.kind != PolicyKind::static_split) {
                if (!sim.oracle_accepts(rep.queue, rep.schedule))
                    raise(Errc::internal_policy_error,
                          "oracle rejected the schedule at slot " + std::to_string(t));
            }
            log << report_to_json(rep).dump() << "\n";
            csv << rep.slot;
            for (std::size_t w = 0; w < rep.backlogs.size(); ++w)
                csv << "," << rep.backlogs[w] << "," << rep.schedule[w] << ","
                    << rep.immediate[w];
            csv << "\n";
        }
    } catch (const Error& e) {
        if (e.code() == Errc::not_schedulable) exit_code = 3;
        else throw;
        ordered_json line;
        line["error"] = e.what();
        log << line.dump() << "\n";
    }

    ordered_json summary;
    summary["slots_run"] = sim.now();
    summary["flows"] = sim.flow_count();
    summary["conservation"] = sim.conservation_holds();
    ordered_json audits = ordered_json::array();
    i64 total_late = 0;
    bool any_violation = false;
    for (int w = 0; w < sim.flow_count(); ++w) {
        GuaranteeAudit a = sim.verify_guarantee(w);
        BoundsRow b = sim.bounds_report(w);
        ordered_json row;
        row["flow"] = w;
        row["pass"] = a.pass;
        if (!a.pass) {
            row["violation_j"] = a.violation_j;
            row["deficit"] = a.deficit;
        }
        row["late_tasks"] = a.late_tasks;
        row["max_backlog"] = b.max_backlog;
        row["backlog_bound"] = b.backlog_bound;
        row["max_delay"] = b.max_delay;
        row["delay_bound"] = is_beyond(b.delay_bound) ? ordered_json(nullptr)
                                                      : ordered_json(b.delay_bound);
        audits.push_back(std::move(row));
        total_late += a.late_tasks;
        any_violation = any_violation || !a.pass;
    }
    summary["audits"] = std::move(audits);
    summary["late_tasks_total"] = total_late;
    if (exit_code == 0 && (any_violation || total_late > 0)) exit_code = 2;
    summary["exit_code"] = exit_code;

    out.exit_code = exit_code;
    out.log_lines = log.str();
    out.summary_json = summary.dump(2);
    out.plot_csv = csv.str();
    return out;
}

namespace {

/// View and baseline at slot 0: queues from initial backlogs plus the first
/// arrival row.
struct Slot0 {
    Simulator sim;
    std::vector<i64> queue;
    SystemView view;
};

Slot0 slot0_state(const Scenario& sc) {
    Simulator sim = build_simulator(sc);
    std::vector<i64> queue(sc.flows.size(), 0);
    SplitMix64 rng{sc.generator ? sc.generator->seed : 0};
    auto arrivals = arrivals_for_slot(sc, &rng, 0, sc.flows.size());
    for (std::size_t w = 0; w < sc.flows.size(); ++w)
        queue[w] = sc.flows[w].backlog + arrivals[w];
    SystemView v = sim.view(queue);
    return Slot0{std::move(sim), std::move(queue), std::move(v)};
}

} // namespace

std::string check_report(const Scenario& sc) {
    Slot0 st = slot0_state(sc);
    SchedResult r = st.sim.check_schedulable();
    ordered_json out;
    out["schedulable"] = r.schedulable;
    if (!r.schedulable) {
        out["violating_interval"] = {r.i, r.j};
    } else {
        SetFunction beta_fn = baseline(st.view);
        auto [lo, hi] = feasible_mu_range(beta_fn, st.view);
        out["mu_range"] = {lo, hi};
    }
    return out.dump(2);
}

bool check_schedulable_only(const Scenario& sc) {
    Slot0 st = slot0_state(sc);
    return st.sim.check_schedulable().schedulable;
}

std::string polytope_report(const Scenario& sc) {
    Slot0 st = slot0_state(sc);
    SchedResult r = st.sim.check_schedulable();
    if (!r.schedulable)
        raise(Errc::not_schedulable, "polytope report needs a schedulable scenario");
    const int n = static_cast<int>(sc.flows.size());
    SetFunction beta_fn = baseline(st.view);
    auto [lo, hi] = feasible_mu_range(beta_fn, st.view);
    const i64 mu = hi; // work-conserving slice
    SetFunction bmu = beta_mu(beta_fn, st.view, mu);

    ordered_json out;
    out["mu_range"] = {lo, hi};
    out["mu"] = mu;
    if (n <= kDenseSetFnLimit) {
        ordered_json beta_tab = ordered_json::array();
        for (std::uint32_t mask = 0; mask <= beta_fn.full_mask() && n > 0; ++mask) {
            std::vector<int> members;
            for (int w = 0; w < n; ++w)
                if (mask & (1u << w)) members.push_back(w);
            beta_tab.push_back(
                ordered_json{{"subset", members}, {"beta", beta_fn(mask)}, {"beta_mu", bmu(mask)}});
        }
        out["baseline"] = std::move(beta_tab);
    }
    if (n >= 1 && n <= 4) {
        // All vertices, indexed by priority order (last = highest).
        std::vector<int> rank(static_cast<std::size_t>(n));
        std::iota(rank.begin(), rank.end(), 1);
        ordered_json verts = ordered_json::array();
        do {
            verts.push_back(ordered_json{{"rank", rank}, {"d", vertex(bmu, rank)}});
        } while (std::next_permutation(rank.begin(), rank.end()));
        out["vertices"] = std::move(verts);
    }
    if (n >= 1) {
        Centroid c = shapley_centroid(bmu);
        ordered_json exact = ordered_json::array();
        for (const auto& x : c.exact) exact.push_back(rational_json(x));
        out["centroid"] = ordered_json{{"exact", exact}, {"rounded", c.rounded}};
    }
    ordered_json members = ordered_json::array();
    for (const auto& dq : sc.schedule_queries) {
        const bool inside = contains(beta_fn, st.queue, sc.capacity, dq);
        members.push_back(ordered_json{{"d", dq}, {"feasible", inside}});
    }
    out["memberships"] = std::move(members);
    return out.dump(2);
}

std::string compose_report(const Scenario& sc) {
    if (sc.flows.size() != 2)
        raise(Errc::invalid_argument, "compose wants exactly two flows: inner then outer");
    const auto* inner = sc.flows[0].service.as_dual();
    const auto* outer = sc.flows[1].service.as_dual();
    if (!inner || !outer)
        raise(Errc::unsupported_service_kind, "compose is defined for dual-curve services");
    DualCurveService combined = compose(*inner, *outer, sc.flows[1].backlog);
    ordered_json out;
    out["b"] = sc.flows[0].backlog + sc.flows[1].backlog;
    out["u"] = std::vector<i64>(combined.dynamic_curve.entries().begin(),
                                combined.dynamic_curve.entries().end());
    out["v"] = std::vector<i64>(combined.static_curve.entries().begin(),
                                combined.static_curve.entries().end());
    return out.dump(2);
}

std::string gain_report_json(const Scenario& sc) {
    Slot0 st = slot0_state(sc);
    const int n = static_cast<int>(sc.flows.size());
    std::vector<SpectrumFn> spectra;
    for (int w = 0; w < n; ++w)
        spectra.push_back(st.sim.flow(w).service.spectrum(st.sim.flow(w).backlog));
    std::optional<std::vector<std::uint32_t>> part;
    if (sc.partition) {
        std::vector<std::uint32_t> masks;
        for (const auto& cls : *sc.partition) {
            std::uint32_t m = 0;
            for (int idx : cls) {
                if (idx < 0 || idx >= n) raise(Errc::invalid_argument, "partition index range");
                m |= 1u << idx;
            }
            masks.push_back(m);
        }
        part = std::move(masks);
    }
    GainReport g = multiplexing_gain(spectra, sc.horizon, part, n <= 6);
    ordered_json out;
    ordered_json rho = ordered_json::array();
    for (const auto& [mask, r] : g.rho) {
        std::vector<int> members;
        for (int w = 0; w < n; ++w)
            if (mask & (1u << w)) members.push_back(w);
        rho.push_back(ordered_json{{"subset", members}, {"rho", rational_json(r)}});
    }
    out["rho"] = std::move(rho);
    out["eta"] = rational_json(g.eta);
    if (g.eta_partition) out["eta_partition"] = rational_json(*g.eta_partition);
    return out.dump(2);
}

std::string cumvec_to_json(const CumVec& v) {
    return ordered_json(std::vector<i64>(v.entries().begin(), v.entries().end())).dump();
}

CumVec cumvec_from_json(const std::string& json_text, i64 horizon_cap) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) bad("cumulative vector must be a JSON array");
    std::vector<i64> e;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number_integer())
            bad("cumulative vector entry " + std::to_string(k) + " must be an integer");
        e.push_back(j[k].get<i64>());
    }
    if (static_cast<i64>(e.size()) - 1 > horizon_cap) bad("cumulative vector above horizon cap");
    // Position-indexed invariant errors come from the CumVec constructor.
    return CumVec(std::move(e));
}

} // namespace wcsched

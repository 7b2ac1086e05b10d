#pragma once

#include "wcsched/sim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wcsched {

/// Deterministic 64-bit generator for arrival traces; fixed algorithm so
/// identical seeds give bit-identical runs on every platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound] by rejection-free folding (bound small).
    i64 below(i64 bound) { return static_cast<i64>(next() % static_cast<std::uint64_t>(bound + 1)); }
};

struct ArrivalGenerator {
    std::uint64_t seed = 0;
    i64 slots = 0;
    i64 max_per_slot = 0;
};

struct FlowSpec {
    FlowService service;
    i64 backlog = 0;
};

struct Admission {
    i64 slot = 0;
    FlowSpec flow;
};

struct Scenario {
    i64 capacity = 0;
    i64 horizon = 0;
    std::vector<FlowSpec> flows;
    std::vector<std::vector<i64>> trace; ///< per-slot, per-flow arrivals
    std::optional<ArrivalGenerator> generator;
    std::optional<i64> slots; ///< run length override
    PolicySpec policy;
    std::vector<Admission> admissions;
    std::vector<std::vector<i64>> schedule_queries; ///< polytope membership probes
    std::optional<std::vector<std::vector<int>>> partition; ///< for the gain report
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

/// Number of slots the scenario runs for.
i64 run_length(const Scenario& sc);

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    bool oracle_check = false;
};

struct RunResult {
    int exit_code = 0; ///< 0 pass, 2 guarantee violation, 3 unschedulable
    std::string log_lines;    ///< JSON lines, one SlotReport per slot
    std::string summary_json; ///< audits, bounds, conservation
    std::string plot_csv;     ///< slot, per-flow backlog / served / due-now
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opts);

/// Sub-reports for the remaining CLI commands; all deterministic JSON.
std::string check_report(const Scenario& sc);
bool check_schedulable_only(const Scenario& sc);
std::string polytope_report(const Scenario& sc);
std::string compose_report(const Scenario& sc);
std::string gain_report_json(const Scenario& sc);

/// JSON (de)serialization used across the tool surface.
std::string cumvec_to_json(const CumVec& v);
CumVec cumvec_from_json(const std::string& json_text, i64 horizon_cap);

} // namespace wcsched

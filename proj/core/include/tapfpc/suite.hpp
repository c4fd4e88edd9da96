#pragma once

#include <string>
#include <vector>

#include "tapfpc/lns.hpp"

namespace tapfpc {

struct OracleResult {
    bool solved = false;
    int optimal_soc = -1;
    std::string refusal;  // set when the guard rejects the instance
};

// Exact TAPF-PC optimum for tiny instances (k <= 2, m <= 4, map <= 8x8):
// enumerates every precedence-consistent partition of the tasks into
// ordered per-agent sequences and solves each joint search space exactly.
OracleResult brute_force_optimum(const Instance& instance);

struct MethodConfig {
    std::string name;        // regret | local-pbs | global-pbs
    RepairKind repair = RepairKind::Neighborhood;
    RepairScope scope = RepairScope::Global;
    ConflictMode mode = ConflictMode::Hard;
};
MethodConfig method_from_name(const std::string& method, const std::string& mode);

struct SuiteTier {
    std::string name;
    std::string map_file;
    GeneratorConfig generator;
    // Alternative to the generator: run a fixed instance file, optionally
    // seeding from a prescribed assignment.
    std::string instance_file;
    std::optional<Assignment> forced_assignment;
};

struct SuiteConfig {
    std::vector<SuiteTier> tiers;
    std::vector<MethodConfig> methods;
    double budget_secs = 0.0;
    int budget_iters = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir;
    bool write_traces = true;
};

SuiteConfig read_suite_config(const std::string& json_text, const std::string& base_dir);

struct SuiteRow {
    std::string tier;
    int instance_id = 0;
    std::string method;
    bool seeded = false;
    int seed_soc = 0;
    int final_soc = 0;
    int delta_soc = 0;
    double relative_pct = 0.0;
    bool improved = false;
    int seed_wait = 0;
    int final_wait = 0;
    int iterations = 0;
    PhaseTimers timers;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;

    double improvement_frequency(const std::string& method) const;
    double median_relative_reduction(const std::string& method) const;
    std::string to_csv() const;
    std::string aggregate_json(const std::vector<std::string>& methods) const;
};

// Generates the configured instances, builds one shared seed per instance,
// runs every configured method against it, validates all finals, and emits
// report files under cfg.out_dir. Throws on any invariant violation: an
// invalid solution is a bug, not a data point.
SuiteReport run_suite(const SuiteConfig& cfg);

// Per-run rng stream, decoupled across (suite seed, instance, method).
std::uint64_t derive_run_seed(std::uint64_t suite_seed, int instance_id, int method_id);

}  // namespace tapfpc

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tapfpc/suite.hpp"

namespace tapfpc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

MethodConfig method_from_name(const std::string& method, const std::string& mode) {
    MethodConfig cfg;
    cfg.name = method;
    if (method == "regret") {
        cfg.repair = RepairKind::Regret;
        cfg.scope = RepairScope::Global;
    } else if (method == "local-pbs") {
        cfg.repair = RepairKind::Neighborhood;
        cfg.scope = RepairScope::Local;
    } else if (method == "global-pbs") {
        cfg.repair = RepairKind::Neighborhood;
        cfg.scope = RepairScope::Global;
    } else {
        throw std::runtime_error("unknown method '" + method +
                                 "' (expected regret | local-pbs | global-pbs)");
    }
    if (mode == "hard")
        cfg.mode = ConflictMode::Hard;
    else if (mode == "relaxed")
        cfg.mode = ConflictMode::Relaxed;
    else
        throw std::runtime_error("unknown mode '" + mode + "' (expected hard | relaxed)");
    return cfg;
}

std::uint64_t derive_run_seed(std::uint64_t suite_seed, int instance_id, int method_id) {
    // splitmix64 over the packed identifiers
    std::uint64_t x = suite_seed ^ (0x9e3779b97f4a7c15ull * (std::uint64_t)(instance_id + 1)) ^
                      (0xbf58476d1ce4e5b9ull * (std::uint64_t)(method_id + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

SuiteConfig read_suite_config(const std::string& json_text, const std::string& base_dir) {
    json j = json::parse(json_text);
    SuiteConfig cfg;
    for (const auto& t : j.at("tiers")) {
        SuiteTier tier;
        tier.name = t.at("name").get<std::string>();
        auto resolve = [&base_dir](std::string path) {
            if (!path.empty() && path[0] != '/' && !base_dir.empty())
                path = base_dir + "/" + path;
            return path;
        };
        if (t.contains("instance_file")) {
            tier.instance_file = resolve(t.at("instance_file").get<std::string>());
            if (t.contains("forced_assignment")) {
                Assignment forced;
                forced.sequences = t.at("forced_assignment").get<std::vector<std::vector<int>>>();
                tier.forced_assignment = forced;
            }
        } else {
            tier.map_file = resolve(t.at("map_file").get<std::string>());
            tier.generator.map_name = t.at("map_file").get<std::string>();
            tier.generator.num_agents = t.at("agents").get<int>();
            tier.generator.num_tasks = t.at("tasks").get<int>();
            tier.generator.num_precedence = t.at("precedence").get<int>();
            tier.generator.count = t.value("count", 1);
        }
        cfg.tiers.push_back(tier);
    }
    for (const auto& m : j.at("methods"))
        cfg.methods.push_back(
            method_from_name(m.at("method").get<std::string>(), m.value("mode", "hard")));
    cfg.budget_secs = j.value("budget_secs", 0.0);
    cfg.budget_iters = j.value("budget_iters", 0);
    cfg.seed = j.value("seed", 0ull);
    cfg.jobs = j.value("jobs", 1);
    cfg.write_traces = j.value("write_traces", true);
    return cfg;
}

double SuiteReport::improvement_frequency(const std::string& method) const {
    int n = 0, improved = 0;
    for (const auto& r : rows) {
        if (r.method != method || !r.seeded) continue;
        ++n;
        if (r.improved) ++improved;
    }
    return n > 0 ? (double)improved / n : 0.0;
}

double SuiteReport::median_relative_reduction(const std::string& method) const {
    std::vector<double> vals;
    for (const auto& r : rows)
        if (r.method == method && r.seeded) vals.push_back(r.relative_pct);
    if (vals.empty()) return 0.0;
    std::sort(vals.begin(), vals.end());
    const size_t n = vals.size();
    return n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

std::string SuiteReport::to_csv() const {
    std::ostringstream out;
    out << "tier,instance,method,seeded,seed_soc,final_soc,delta_soc,relative_pct,improved,"
           "seed_wait,final_wait,iterations,seed_secs,solve_secs,post_refine_secs\n";
    char buf[32];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.4f", r.relative_pct);
        out << r.tier << ',' << r.instance_id << ',' << r.method << ',' << (r.seeded ? 1 : 0)
            << ',' << r.seed_soc << ',' << r.final_soc << ',' << r.delta_soc << ',' << buf << ','
            << (r.improved ? 1 : 0) << ',' << r.seed_wait << ',' << r.final_wait << ','
            << r.iterations << ',';
        std::snprintf(buf, sizeof(buf), "%.4f", r.timers.seed);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.4f", r.timers.solve);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.4f", r.timers.post_refine);
        out << buf << '\n';
    }
    return out.str();
}

std::string SuiteReport::aggregate_json(const std::vector<std::string>& methods) const {
    json j;
    for (const auto& method : methods) {
        json entry;
        entry["improvement_frequency"] = improvement_frequency(method);
        entry["median_relative_reduction_pct"] = median_relative_reduction(method);
        int n = 0;
        double seed_total = 0, destroy_total = 0, proposal_total = 0, solve_total = 0,
               validate_total = 0, refine_total = 0;
        for (const auto& r : rows) {
            if (r.method != method || !r.seeded) continue;
            ++n;
            seed_total += r.timers.seed;
            destroy_total += r.timers.destroy;
            proposal_total += r.timers.proposal;
            solve_total += r.timers.solve;
            validate_total += r.timers.validate;
            refine_total += r.timers.post_refine;
        }
        entry["runs"] = n;
        const double total = seed_total + destroy_total + proposal_total + solve_total +
                             validate_total + refine_total;
        json phases;
        auto pct = [&](double v) { return total > 0 ? 100.0 * v / total : 0.0; };
        phases["seed_pct"] = pct(seed_total);
        phases["destroy_pct"] = pct(destroy_total);
        phases["proposal_pct"] = pct(proposal_total);
        phases["embedded_solve_pct"] = pct(solve_total);
        phases["validation_pct"] = pct(validate_total);
        phases["post_refine_pct"] = pct(refine_total);
        entry["runtime_decomposition"] = phases;
        j[method] = entry;
    }
    return j.dump(2) + "\n";
}

SuiteReport run_suite(const SuiteConfig& cfg) {
    SuiteReport report;
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);

    struct Job {
        SuiteTier tier;
        int instance_id;
        Instance instance;
    };
    std::vector<Job> jobs;
    int next_id = 0;
    for (const auto& tier : cfg.tiers) {
        if (!tier.instance_file.empty()) {
            jobs.push_back({tier, next_id, load_instance_file(tier.instance_file)});
            ++next_id;
            continue;
        }
        GridMap map = load_map_file(tier.map_file);
        for (int i = 0; i < tier.generator.count; ++i) {
            GeneratorConfig gen = tier.generator;
            gen.seed = derive_run_seed(cfg.seed, next_id, -1);
            jobs.push_back({tier, next_id, generate_instance(gen, map)});
            ++next_id;
        }
    }

    struct RunOutput {
        SuiteRow row;
        std::string trace_csv;
        std::string trace_name;
        std::string error;
    };
    std::vector<RunOutput> outputs(jobs.size() * cfg.methods.size());

    std::mutex take_mutex;
    size_t next_job = 0;
    auto worker = [&]() {
        while (true) {
            size_t slot;
            {
                std::lock_guard<std::mutex> lock(take_mutex);
                if (next_job >= outputs.size()) return;
                slot = next_job++;
            }
            const Job& job = jobs[slot / cfg.methods.size()];
            const int method_id = (int)(slot % cfg.methods.size());
            const MethodConfig& method = cfg.methods[method_id];
            RunOutput& out = outputs[slot];

            LnsConfig lns;
            lns.repair = method.repair;
            lns.scope = method.scope;
            lns.mode = method.mode;
            lns.budget_secs = cfg.budget_secs;
            lns.budget_iters = cfg.budget_iters;
            lns.rng_seed = derive_run_seed(cfg.seed, job.instance_id, method_id);
            lns.forced_seed_assignment = job.tier.forced_assignment;

            LnsResult result = run_lns(job.instance, lns);

            SuiteRow& row = out.row;
            row.tier = job.tier.name;
            row.instance_id = job.instance_id;
            row.method = method.name + (method.mode == ConflictMode::Relaxed ? "-relaxed" : "");
            row.seeded = result.trace.seeded;
            if (result.found) {
                ValidationReport check = validate_solution(job.instance, result.best);
                if (!check.ok()) {
                    out.error = "invalid final solution for instance " +
                                std::to_string(job.instance_id) + " method " + row.method;
                    continue;
                }
                int best_seen = kInf;
                for (const auto& it : result.trace.iterations) {
                    if (it.best_soc > best_seen) {
                        out.error = "best-so-far trace is not nonincreasing";
                        break;
                    }
                    best_seen = std::min(best_seen, it.best_soc);
                }
                row.seed_soc = result.trace.seed_soc;
                row.final_soc = result.trace.final_soc;
                auto metrics = improvement_metrics(result.trace.seed_soc, result.trace.final_soc,
                                                   result.trace.seed_wait,
                                                   result.trace.final_wait);
                row.delta_soc = metrics.delta_soc;
                row.relative_pct = metrics.relative_reduction_pct;
                row.improved = metrics.improved;
                row.seed_wait = result.trace.seed_wait;
                row.final_wait = result.trace.final_wait;
                row.iterations = (int)result.trace.iterations.size();
                row.timers = result.trace.timers;
                if (cfg.write_traces) {
                    out.trace_csv = result.trace.to_csv();
                    out.trace_name = "trace_" + std::to_string(job.instance_id) + "_" +
                                     row.method + ".csv";
                }
            }
        }
    };

    const int n_threads = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (auto& out : outputs) {
        if (!out.error.empty()) throw std::runtime_error("suite invariant failure: " + out.error);
        report.rows.push_back(out.row);
        if (!cfg.out_dir.empty() && !out.trace_name.empty()) {
            std::ofstream f(fs::path(cfg.out_dir) / out.trace_name);
            f << out.trace_csv;
        }
    }

    // Seed construction is deterministic, so every method must have been
    // compared against the same fixed-assignment seed.
    for (size_t i = 0; i < report.rows.size(); ++i) {
        for (size_t j = i + 1; j < report.rows.size(); ++j) {
            const auto& a = report.rows[i];
            const auto& b = report.rows[j];
            if (a.instance_id == b.instance_id && a.seeded && b.seeded &&
                a.seed_soc != b.seed_soc)
                throw std::runtime_error("suite invariant failure: methods saw different seeds");
        }
    }

    if (!cfg.out_dir.empty()) {
        std::ofstream csv(fs::path(cfg.out_dir) / "suite.csv");
        csv << report.to_csv();
        std::vector<std::string> method_names;
        for (const auto& m : cfg.methods)
            method_names.push_back(m.name + (m.mode == ConflictMode::Relaxed ? "-relaxed" : ""));
        std::ofstream agg(fs::path(cfg.out_dir) / "aggregate.json");
        agg << report.aggregate_json(method_names);
    }
    return report;
}

}  // namespace tapfpc

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tapfpc/lns.hpp"
#include "tapfpc/suite.hpp"

namespace fs = std::filesystem;
using namespace tapfpc;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

int cmd_generate(const std::string& map_path, int agents, int tasks, int prec, int count,
                 std::uint64_t seed, const std::string& out_dir) {
    GridMap map = load_map_file(map_path);
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        GeneratorConfig cfg;
        cfg.map_name = fs::path(map_path).filename().string();
        cfg.num_agents = agents;
        cfg.num_tasks = tasks;
        cfg.num_precedence = prec;
        cfg.seed = seed + (std::uint64_t)i;
        Instance inst = generate_instance(cfg, map);
        const std::string name = "instance_" + std::to_string(i) + ".json";
        save_instance_file(inst, (fs::path(out_dir) / name).string());
        fs::copy_file(map_path, fs::path(out_dir) / cfg.map_name,
                      fs::copy_options::overwrite_existing);
        std::cout << "wrote " << (fs::path(out_dir) / name).string() << "\n";
    }
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& method,
              const std::string& mode, double budget_secs, int budget_iters, std::uint64_t seed,
              const std::string& trace_path, const std::string& out_path,
              const std::string& summary_path, const std::string& forced_assignment,
              int local_agent_radius) {
    Instance inst = load_instance_file(instance_path);
    MethodConfig mc = method_from_name(method, mode);

    LnsConfig cfg;
    cfg.repair = mc.repair;
    cfg.scope = mc.scope;
    cfg.mode = mc.mode;
    cfg.budget_secs = budget_secs;
    cfg.budget_iters = budget_iters;
    cfg.rng_seed = seed;
    cfg.local_agent_radius = local_agent_radius;
    if (!forced_assignment.empty()) {
        Assignment forced;
        forced.sequences =
            nlohmann::json::parse(forced_assignment).get<std::vector<std::vector<int>>>();
        if (!forced.is_partition(inst.num_tasks()))
            throw std::runtime_error("--force-assignment must be a partition of the task set");
        cfg.forced_seed_assignment = forced;
    }

    LnsResult result = run_lns(inst, cfg);
    if (!result.trace.seeded) {
        std::cerr << "seed construction failed; instance is unseeded\n";
        return 2;
    }
    ValidationReport report = validate_solution(inst, result.best);
    if (!report.ok()) {
        std::cerr << "internal error: final solution failed validation\n" << report.to_json();
        return 3;
    }
    auto metrics = improvement_metrics(result.trace.seed_soc, result.trace.final_soc,
                                       result.trace.seed_wait, result.trace.final_wait);
    std::cout << "seed_soc=" << result.trace.seed_soc << " final_soc=" << result.trace.final_soc
              << " delta=" << metrics.delta_soc << " relative_pct=" << metrics.relative_reduction_pct
              << " iterations=" << result.trace.iterations.size() << "\n";
    if (!trace_path.empty()) spill(trace_path, result.trace.to_csv());
    if (!out_path.empty()) spill(out_path, write_solution(inst, result.best));
    if (!summary_path.empty()) spill(summary_path, result.trace.summary_json());
    return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
    Instance inst = load_instance_file(instance_path);
    Solution sol = read_solution(inst, slurp(solution_path));
    ValidationReport report = validate_solution(inst, sol);
    std::cout << report.to_json();
    return report.ok() ? 0 : 1;
}

int cmd_oracle(const std::string& instance_path) {
    Instance inst = load_instance_file(instance_path);
    OracleResult res = brute_force_optimum(inst);
    if (!res.solved) {
        std::cerr << res.refusal << "\n";
        return 1;
    }
    std::cout << "optimal_soc=" << res.optimal_soc << "\n";
    return 0;
}

int cmd_suite(const std::string& config_path, const std::string& out_dir, int jobs) {
    const std::string base_dir = fs::path(config_path).parent_path().string();
    SuiteConfig cfg = read_suite_config(slurp(config_path), base_dir);
    cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    SuiteReport report = run_suite(cfg);
    std::cout << report.to_csv();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TAPF-PC solver and benchmark harness"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate random instances on a map");
    std::string gen_map, gen_out;
    int gen_agents = 1, gen_tasks = 1, gen_prec = 0, gen_count = 1;
    std::uint64_t gen_seed = 0;
    gen->add_option("--map", gen_map, "MovingAI map file")->required();
    gen->add_option("--agents", gen_agents, "agent count")->required();
    gen->add_option("--tasks", gen_tasks, "task count")->required();
    gen->add_option("--prec", gen_prec, "precedence edge count")->required();
    gen->add_option("--count", gen_count, "instances to generate");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--out", gen_out, "output directory")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Run the LNS solver on an instance");
    std::string solve_instance, solve_method = "global-pbs", solve_mode = "hard";
    std::string solve_trace, solve_out, solve_summary, solve_forced;
    double solve_budget_secs = 0.0;
    int solve_budget_iters = 0;
    int solve_local_radius = 2;
    std::uint64_t solve_seed = 0;
    solve->add_option("--instance", solve_instance, "instance JSON file")->required();
    solve->add_option("--method", solve_method, "regret | local-pbs | global-pbs");
    solve->add_option("--mode", solve_mode, "hard | relaxed");
    solve->add_option("--budget-secs", solve_budget_secs, "wall-clock budget for the LNS loop");
    solve->add_option("--budget-iters", solve_budget_iters,
                      "iteration budget (reproducible traces)");
    solve->add_option("--seed", solve_seed, "rng seed");
    solve->add_option("--trace", solve_trace, "per-iteration trace CSV output");
    solve->add_option("--out", solve_out, "solution JSON output");
    solve->add_option("--summary", solve_summary, "run summary JSON output");
    solve->add_option("--force-assignment", solve_forced,
                      "seed from a fixed assignment, e.g. [[0,3],[2,1]]");
    solve->add_option("--local-agent-radius", solve_local_radius,
                      "extra nearby agents eligible under local scope");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate a solution file");
    std::string val_instance, val_solution;
    validate->add_option("--instance", val_instance, "instance JSON file")->required();
    validate->add_option("--solution", val_solution, "solution JSON file")->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exact optimum for tiny instances");
    std::string oracle_instance;
    oracle->add_option("--instance", oracle_instance, "instance JSON file")->required();

    // suite
    auto* suite = app.add_subcommand("suite", "Run a benchmark suite from a config file");
    std::string suite_config, suite_out;
    int suite_jobs = 0;
    suite->add_option("--config", suite_config, "suite config JSON")->required();
    suite->add_option("--out", suite_out, "output directory")->required();
    suite->add_option("--jobs", suite_jobs, "parallel runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_map, gen_agents, gen_tasks, gen_prec, gen_count, gen_seed,
                                gen_out);
        if (solve->parsed())
            return cmd_solve(solve_instance, solve_method, solve_mode, solve_budget_secs,
                             solve_budget_iters, solve_seed, solve_trace, solve_out,
                             solve_summary, solve_forced, solve_local_radius);
        if (validate->parsed()) return cmd_validate(val_instance, val_solution);
        if (oracle->parsed()) return cmd_oracle(oracle_instance);
        if (suite->parsed()) return cmd_suite(suite_config, suite_out, suite_jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

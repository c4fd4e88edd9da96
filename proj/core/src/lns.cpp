#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "tapfpc/lns.hpp"

namespace tapfpc {

double AcceptanceState::temperature() const {
    return initial_temperature * std::pow(cooling, (double)iteration);
}

bool accept_candidate(const Solution& candidate, const Solution& incumbent,
                      AcceptanceState& state) {
    const double threshold = (double)incumbent.soc + state.temperature();
    bool accept = (double)candidate.soc < threshold;
    if (state.rule == ConflictMode::Relaxed)
        accept = accept && candidate.soft_conflicts <= incumbent.soft_conflicts;
    ++state.iteration;  // one geometric decay per iteration
    return accept;
}

namespace {

const char* outcome_name(RepairOutcome o) {
    switch (o) {
        case RepairOutcome::NewBest: return "new-best";
        case RepairOutcome::ImprovedIncumbent: return "improved";
        case RepairOutcome::Accepted: return "accepted";
        case RepairOutcome::Rejected: return "rejected";
        case RepairOutcome::Failed: return "failed";
    }
    return "unknown";
}

class PhaseClock {
public:
    explicit PhaseClock(double& sink)
        : sink_(sink), begin_(std::chrono::steady_clock::now()) {}
    ~PhaseClock() {
        sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
    }

private:
    double& sink_;
    std::chrono::steady_clock::time_point begin_;
};

}  // namespace

std::string RunTrace::to_csv() const {
    std::ostringstream out;
    out << "iter,wall_ms,operator,outcome,candidate_soc,incumbent_soc,best_soc,temperature\n";
    char tbuf[32];
    for (const auto& r : iterations) {
        std::snprintf(tbuf, sizeof(tbuf), "%.9f", r.temperature);
        out << r.iteration << ',' << r.wall_ms << ',' << destroy_op_name(r.op) << ','
            << outcome_name(r.outcome) << ',' << r.candidate_soc << ',' << r.incumbent_soc << ','
            << r.best_soc << ',' << tbuf << '\n';
    }
    return out.str();
}

std::string RunTrace::summary_json() const {
    nlohmann::ordered_json j;
    j["seeded"] = seeded;
    j["iterations"] = iterations.size();
    j["seed_soc"] = seed_soc;
    j["final_soc"] = final_soc;
    auto metrics = improvement_metrics(seed_soc, final_soc, seed_wait, final_wait);
    j["delta_soc"] = metrics.delta_soc;
    j["relative_reduction_pct"] = metrics.relative_reduction_pct;
    j["improved"] = metrics.improved;
    j["seed_precedence_wait"] = seed_wait;
    j["final_precedence_wait"] = final_wait;
    j["wait_reduction"] = metrics.wait_reduction;
    j["wait_reduction_pct"] = metrics.wait_reduction_pct;

    const double total = timers.seed + timers.destroy + timers.proposal + timers.solve +
                         timers.validate + timers.post_refine;
    nlohmann::ordered_json phases;
    auto phase = [&](const char* name, double secs) {
        phases[name] = {{"secs", secs}, {"pct", total > 0 ? 100.0 * secs / total : 0.0}};
    };
    phase("seed", timers.seed);
    phase("destroy", timers.destroy);
    phase("proposal", timers.proposal);
    phase("embedded_solve", timers.solve);
    phase("validation", timers.validate);
    phase("post_refine", timers.post_refine);
    j["phase_timers"] = phases;

    nlohmann::ordered_json ops;
    for (int i = 0; i < kNumDestroyOps; ++i) {
        const auto& s = operators[i];
        ops[destroy_op_name((DestroyOp)i)] = {
            {"uses", s.uses},
            {"improvements", s.improvements},
            {"new_bests", s.new_bests},
            {"failures", s.failures},
            {"improvement_rate", s.uses > 0 ? (double)s.improvements / s.uses : 0.0},
        };
    }
    j["operators"] = ops;
    return j.dump(2) + "\n";
}

Solution post_refine(const Instance& instance, const Solution& best, const PbsOptions& options,
                     DistanceTable& dist) {
    std::vector<int> all_agents(instance.num_agents());
    for (int a = 0; a < instance.num_agents(); ++a) all_agents[a] = a;

    PbsOptions refine_options = options;
    refine_options.low_level = LowLevel::MlaStar;
    refine_options.mode = ConflictMode::Hard;

    PbsResult pbs =
        solve_pbs_pc(instance, best.assignment, all_agents, nullptr, refine_options, dist);
    Solution refined;
    if (!assemble_full_solution(instance, best.assignment, pbs, refined)) return best;
    if (!validate_solution(instance, refined).ok()) return best;
    if (refined.soc >= best.soc) return best;  // strict improvement required
    return refined;
}

LnsResult run_lns(const Instance& instance, const LnsConfig& config) {
    LnsResult result;
    DistanceTable dist(instance.map);
    const auto loop_clock = std::chrono::steady_clock::now;

    PbsOptions solver = config.solver;
    solver.mode = config.mode;
    if (config.budget_iters > 0) solver.time_limit_secs = 0;  // reproducible runs

    SeedOptions seed_options;
    seed_options.forced_assignment = config.forced_seed_assignment;
    seed_options.pbs = solver;
    SeedResult seed = build_seed(instance, seed_options, dist);
    result.trace.timers.seed = seed.seed_secs;
    result.trace.seeded = seed.found;
    if (!seed.found) return result;

    Solution incumbent = seed.solution;
    Solution best = seed.solution;
    result.trace.seed_soc = incumbent.soc;
    result.trace.seed_wait = total_precedence_wait(incumbent);

    OperatorPortfolio portfolio;
    AcceptanceState acceptance;
    acceptance.initial_temperature = 0.05 * incumbent.soc;
    acceptance.rule = config.mode;
    std::mt19937_64 rng(config.rng_seed);
    DestroyDiagnostics diagnostics;

    PbsOptions repair_solver = solver;
    repair_solver.low_level = LowLevel::Sipps;

    const auto loop_start = loop_clock();
    const bool iter_mode = config.budget_iters > 0;
    int iteration = 0;
    while (true) {
        if (iter_mode) {
            if (iteration >= config.budget_iters) break;
        } else {
            const double elapsed = std::chrono::duration<double>(loop_clock() - loop_start).count();
            if (elapsed >= config.budget_secs) break;
        }

        IterationRecord record;
        record.iteration = iteration;
        record.temperature = acceptance.temperature();
        record.op = DestroyOp::Random;

        DestroyOp op = select_operator(portfolio, rng);
        record.op = op;
        ++result.trace.operators[(int)op].uses;

        Neighborhood nbhd;
        {
            PhaseClock clock(result.trace.timers.destroy);
            auto seeds = seed_tasks(op, instance, incumbent, diagnostics, config.destroy_seed_size,
                                    dist, rng);
            nbhd = close_and_excise(instance, incumbent, seeds, dist);
        }

        RepairResult repair;
        if (config.repair == RepairKind::Regret) {
            PhaseClock clock(result.trace.timers.solve);
            repair = repair_regret(instance, nbhd, repair_solver, dist);
        } else {
            RepairProposal proposal;
            {
                PhaseClock clock(result.trace.timers.proposal);
                proposal = build_proposal(instance, nbhd, config.scope, config.local_agent_radius,
                                          dist);
            }
            PhaseClock clock(result.trace.timers.solve);
            repair = repair_neighborhood(instance, nbhd, proposal, repair_solver, dist);
        }

        RepairOutcome outcome;
        if (!repair.found) {
            outcome = RepairOutcome::Failed;
            ++result.trace.operators[(int)op].failures;
            diagnostics.last_failure_agents =
                repair.failed_agents.empty() ? nbhd.owner_agents : repair.failed_agents;
            ++acceptance.iteration;  // failed iterations still cool the threshold
        } else {
            Solution& candidate = repair.candidate;
            ValidationReport report;
            {
                PhaseClock clock(result.trace.timers.validate);
                report = validate_solution(instance, candidate);
            }
            for (const auto& e : report.entries) {
                if (e.kind == Defect::VertexConflict || e.kind == Defect::EdgeConflict)
                    diagnostics.record_conflict(iteration, e.a, e.b,
                                                e.a >= 0 ? candidate.paths[e.a].at(e.timestep) : -1);
            }
            const bool fully_valid = report.ok();
            if (config.mode == ConflictMode::Hard && !fully_valid) {
                // A hard-mode repair may not carry any defect.
                outcome = RepairOutcome::Failed;
                ++result.trace.operators[(int)op].failures;
                diagnostics.last_failure_agents = nbhd.owner_agents;
                ++acceptance.iteration;
            } else {
                record.candidate_soc = candidate.soc;
                const int incumbent_soc_before = incumbent.soc;
                const bool accepted = accept_candidate(candidate, incumbent, acceptance);
                const bool new_best = fully_valid && candidate.soc < best.soc;
                if (new_best) {
                    best = candidate;
                    ++result.trace.operators[(int)op].new_bests;
                }
                if (accepted) incumbent = candidate;
                if (new_best)
                    outcome = RepairOutcome::NewBest;
                else if (accepted && candidate.soc < incumbent_soc_before)
                    outcome = RepairOutcome::ImprovedIncumbent;
                else if (accepted)
                    outcome = RepairOutcome::Accepted;
                else
                    outcome = RepairOutcome::Rejected;
                if (accepted && candidate.soc < incumbent_soc_before)
                    ++result.trace.operators[(int)op].improvements;
            }
        }
        update_weights(portfolio, op, outcome);
        diagnostics.trim(iteration);

        record.outcome = outcome;
        record.incumbent_soc = incumbent.soc;
        record.best_soc = best.soc;
        record.wall_ms =
            iter_mode ? 0
                      : std::chrono::duration_cast<std::chrono::milliseconds>(loop_clock() -
                                                                              loop_start)
                            .count();
        result.trace.iterations.push_back(record);
        ++iteration;
    }

    {
        PhaseClock clock(result.trace.timers.post_refine);
        best = post_refine(instance, best, solver, dist);
    }
    result.best = std::move(best);
    result.trace.final_soc = result.best.soc;
    result.trace.final_wait = total_precedence_wait(result.best);
    result.found = true;
    return result;
}

}  // namespace tapfpc

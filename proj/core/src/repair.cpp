#include <algorithm>
#include <chrono>
#include <memory>

#include "tapfpc/lns.hpp"

namespace tapfpc {

namespace {

// Replans one agent's suffix (from the task before `pos`, or the start) for
// a trial sequence. Returns the realized completion of the agent's final
// task, or kInf when infeasible; fills the replanned suffix plan.
struct SuffixPlan {
    bool found = false;
    int agent_cost = 0;
    int cut_time = 0;
    std::vector<int> suffix;  // task ids from pos onward
    TimedPlanResult plan;
};

SuffixPlan replan_suffix(const Instance& instance, const Solution& working, int agent,
                         const std::vector<int>& trial_seq, int pos,
                         const std::vector<bool>& present, const ReservationTable& res,
                         DistanceTable& dist) {
    SuffixPlan out;
    const int m = instance.num_tasks();
    out.cut_time = 0;
    int cut_vertex = instance.agent_start(agent);
    if (pos > 0) {
        const int before = trial_seq[pos - 1];
        out.cut_time = working.timings[before].completion;
        cut_vertex = instance.task_goal(before);
    }
    out.suffix.assign(trial_seq.begin() + pos, trial_seq.end());

    TimingContext timing;
    timing.completion.assign(m, kInf);
    timing.frozen.assign(m, false);
    for (int t = 0; t < m; ++t) {
        if (!present[t]) continue;
        if (std::find(out.suffix.begin(), out.suffix.end(), t) != out.suffix.end()) continue;
        timing.completion[t] = working.timings[t].completion;
        timing.frozen[t] = true;
    }
    StageBounds bounds =
        derive_stage_bounds(out.suffix, instance, timing, dist, cut_vertex, out.cut_time);

    std::vector<int> goals;
    for (int t : out.suffix) goals.push_back(instance.task_goal(t));
    out.plan = plan_mla_star(instance.map, cut_vertex, goals, bounds, res, dist, out.cut_time);
    if (!out.plan.found) return out;
    out.found = true;
    out.agent_cost = out.plan.completion_time();
    return out;
}

// Reservation tables per candidate owner (the paths of everyone else),
// rebuilt lazily after a commit changes one agent's path.
class OwnerReservations {
public:
    OwnerReservations(const Instance& instance, const Solution& working)
        : instance_(instance), working_(working), cache_(instance.num_agents()) {}

    const ReservationTable& excluding(int agent) {
        if (!cache_[agent]) {
            auto table = std::make_unique<ReservationTable>();
            for (int b = 0; b < instance_.num_agents(); ++b)
                if (b != agent) table->add_path(working_.paths[b]);
            cache_[agent] = std::move(table);
        }
        return *cache_[agent];
    }

    void invalidate_all() {
        for (auto& entry : cache_) entry.reset();
    }

private:
    const Instance& instance_;
    const Solution& working_;
    std::vector<std::unique_ptr<ReservationTable>> cache_;
};

void commit_suffix(const Instance& instance, Solution& working, int agent,
                   const std::vector<int>& trial_seq, const SuffixPlan& sp) {
    working.assignment.sequences[agent] = trial_seq;
    auto& path = working.paths[agent].vertices;
    path.resize(sp.cut_time + 1);
    path.insert(path.end(), sp.plan.path.vertices.begin() + 1, sp.plan.path.vertices.end());
    const bool has_prefix = sp.suffix.size() < trial_seq.size();
    for (int j = 0; j < (int)sp.suffix.size(); ++j) {
        const int task = sp.suffix[j];
        working.timings[task].completion = sp.plan.stage_completions[j];
        int arrival = sp.plan.stage_completions[j];
        const int goal = instance.task_goal(task);
        const int floor =
            j == 0 ? (has_prefix ? sp.cut_time : -1) : sp.plan.stage_completions[j - 1];
        while (arrival - 1 > floor && working.paths[agent].at(arrival - 1) == goal) --arrival;
        working.timings[task].arrival = arrival;
    }
}

int current_agent_cost(const Solution& working, int agent) {
    const auto& seq = working.assignment.sequences[agent];
    return seq.empty() ? 0 : working.timings[seq.back()].completion;
}

}  // namespace

RepairResult repair_regret(const Instance& instance, const Neighborhood& nbhd,
                           const PbsOptions& solver_options, DistanceTable& dist) {
    RepairResult result;
    if (nbhd.failed) return result;
    const int m = instance.num_tasks();
    const int k = instance.num_agents();

    // A stuck repair registers as a failure instead of stalling the loop.
    const bool deadline_enabled = solver_options.time_limit_secs > 0;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(
                                  std::max(solver_options.time_limit_secs, 0.0)));
    auto expired = [&] {
        return deadline_enabled && std::chrono::steady_clock::now() > deadline;
    };

    Solution working = nbhd.exterior;
    std::vector<bool> present(m, false);
    for (int a = 0; a < k; ++a)
        for (int t : working.assignment.sequences[a]) present[t] = true;

    std::vector<int> pending = nbhd.destroyed;
    DagReachability reach(instance.precedence, m);
    auto preds = instance.precedence.predecessors_adjacency(m);

    OwnerReservations reservations(instance, working);

    // Cached best/second insertion cost per (task, agent); entries go stale
    // when the owner's sequence or a precedence-adjacent timing changes.
    struct AgentCost {
        bool valid = false;
        int best = kInf;
        int best_pos = -1;
        int second = kInf;
    };
    std::vector<std::vector<AgentCost>> costs(m, std::vector<AgentCost>(k));

    auto evaluate = [&](int task, int agent) {
        AgentCost out;
        out.valid = true;
        const auto& seq = working.assignment.sequences[agent];
        const ReservationTable& res = reservations.excluding(agent);
        for (int pos = 0; pos <= (int)seq.size(); ++pos) {
            if (expired()) break;
            bool ok = true;
            for (int i = 0; i < pos && ok; ++i)
                if (reach.reaches(task, seq[i])) ok = false;
            for (int i = pos; i < (int)seq.size() && ok; ++i)
                if (reach.reaches(seq[i], task)) ok = false;
            if (!ok) continue;

            std::vector<int> trial = seq;
            trial.insert(trial.begin() + pos, task);
            SuffixPlan sp = replan_suffix(instance, working, agent, trial, pos, present, res, dist);
            if (!sp.found) continue;
            const int delta = sp.agent_cost - current_agent_cost(working, agent);
            if (delta < out.best) {
                out.second = out.best;
                out.best = delta;
                out.best_pos = pos;
            } else if (delta < out.second) {
                out.second = delta;
            }
        }
        return out;
    };

    while (!pending.empty()) {
        if (expired()) {
            result.failed_agents = nbhd.owner_agents;
            return result;
        }
        // Best and second-best feasible insertion per ready pending task.
        struct Candidate {
            int task = -1, agent = -1, pos = -1;
            int best = kInf;
            int regret = -1;
        };
        std::vector<Candidate> candidates;
        for (int task : pending) {
            bool ready = true;
            for (int p : preds[task])
                if (!present[p]) ready = false;
            if (!ready) continue;

            Candidate c;
            c.task = task;
            int second = kInf;
            for (int a = 0; a < k; ++a) {
                auto& entry = costs[task][a];
                if (!entry.valid) entry = evaluate(task, a);
                if (entry.best < c.best) {
                    second = std::min(c.best, entry.second);
                    c.best = entry.best;
                    c.agent = a;
                    c.pos = entry.best_pos;
                } else {
                    second = std::min(second, entry.best);
                }
            }
            if (c.agent < 0) {
                // No feasible insertion remains: the repair is abandoned.
                result.failed_agents = nbhd.owner_agents;
                return result;
            }
            c.regret = second >= kInf ? kInf : second - c.best;
            candidates.push_back(c);
        }
        if (candidates.empty()) {
            result.failed_agents = nbhd.owner_agents;
            return result;
        }

        // Highest regret first; forced placements (a single spot) rank top.
        int pick = 0;
        for (int i = 1; i < (int)candidates.size(); ++i) {
            if (candidates[i].regret > candidates[pick].regret ||
                (candidates[i].regret == candidates[pick].regret &&
                 (candidates[i].best < candidates[pick].best ||
                  (candidates[i].best == candidates[pick].best &&
                   candidates[i].task < candidates[pick].task))))
                pick = i;
        }
        const Candidate chosen = candidates[pick];

        // Replan the chosen spot against the current paths; cached costs can
        // be stale after earlier commits, so a failure here just invalidates
        // the entry and retries.
        std::vector<int> trial = working.assignment.sequences[chosen.agent];
        trial.insert(trial.begin() + chosen.pos, chosen.task);
        SuffixPlan fresh =
            replan_suffix(instance, working, chosen.agent, trial, chosen.pos, present,
                          reservations.excluding(chosen.agent), dist);
        if (!fresh.found) {
            costs[chosen.task][chosen.agent] = AgentCost{};
            costs[chosen.task][chosen.agent].valid = true;  // known infeasible now
            continue;
        }
        commit_suffix(instance, working, chosen.agent, trial, fresh);
        present[chosen.task] = true;
        pending.erase(std::find(pending.begin(), pending.end(), chosen.task));

        reservations.invalidate_all();
        // The owner's sequence changed; precedence neighbors got new gates.
        for (int t = 0; t < m; ++t) costs[t][chosen.agent].valid = false;
        for (int p : preds[chosen.task])
            for (int a = 0; a < k; ++a) costs[p][a].valid = false;
        for (auto [u, v] : instance.precedence.edges())
            if (u == chosen.task)
                for (int a = 0; a < k; ++a) costs[v][a].valid = false;
    }

    if (!retime_solution(instance, working)) {
        result.failed_agents = nbhd.owner_agents;
        return result;
    }
    ValidationReport report = validate_solution(instance, working);
    if (!report.ok()) {
        result.failed_agents = nbhd.owner_agents;
        return result;
    }
    working.soft_conflicts = 0;
    result.found = true;
    result.candidate = std::move(working);
    return result;
}

RepairResult repair_neighborhood(const Instance& instance, const Neighborhood& nbhd,
                                 const RepairProposal& proposal, const PbsOptions& solver_options,
                                 DistanceTable& dist) {
    RepairResult result;
    if (nbhd.failed || proposal.failed) {
        result.failed_agents = nbhd.owner_agents;
        return result;
    }
    const int k = instance.num_agents();
    const int m = instance.num_tasks();

    // The solve replans every reassignment-eligible agent plus the owners
    // that lost tasks; under global scope that re-coordinates the whole
    // team around the proposal. Agents outside the set keep their plans.
    std::vector<int> solve_set = nbhd.owner_agents;
    solve_set.insert(solve_set.end(), proposal.mutable_agents.begin(),
                     proposal.mutable_agents.end());
    std::sort(solve_set.begin(), solve_set.end());
    solve_set.erase(std::unique(solve_set.begin(), solve_set.end()), solve_set.end());
    if (nbhd.destroyed.empty()) solve_set.clear();

    Assignment assignment;
    assignment.sequences = proposal.sequences;

    if (solve_set.empty()) {
        // Nothing was destroyed: the candidate is the incumbent exterior.
        Solution candidate = nbhd.exterior;
        if (!retime_solution(instance, candidate)) return result;
        result.found = true;
        result.candidate = std::move(candidate);
        return result;
    }

    std::vector<bool> in_solve(k, false);
    for (int a : solve_set) in_solve[a] = true;

    ExteriorContext exterior;
    exterior.frozen_completions.assign(m, -1);
    for (int a = 0; a < k; ++a) {
        if (in_solve[a]) continue;
        exterior.paths.push_back(nbhd.exterior.paths[a]);
        for (int t : nbhd.exterior.assignment.sequences[a])
            exterior.frozen_completions[t] = nbhd.exterior.timings[t].completion;
    }

    PbsResult pbs = solve_pbs_pc(instance, assignment, solve_set, &exterior, solver_options, dist);
    if (!pbs.found) {
        result.failed_agents = solve_set;
        return result;
    }

    // Stitch repaired paths into the frozen exterior and retime everything.
    Solution candidate;
    candidate.assignment = assignment;
    candidate.paths = nbhd.exterior.paths;
    for (int i = 0; i < (int)pbs.agents.size(); ++i) {
        candidate.paths[pbs.agents[i]] = pbs.paths[i];
        candidate.paths[pbs.agents[i]].owner = pbs.agents[i];
    }
    candidate.timings.assign(m, TaskTiming{});
    if (!retime_solution(instance, candidate)) {
        result.failed_agents = solve_set;
        return result;
    }

    ValidationReport report = validate_solution(instance, candidate);
    if (solver_options.mode == ConflictMode::Hard) {
        if (!report.ok()) {
            result.failed_agents = solve_set;
            return result;
        }
        candidate.soft_conflicts = 0;
    } else {
        // Only boundary collisions may remain; everything else is a failure.
        for (const auto& e : report.entries) {
            if (e.kind != Defect::VertexConflict && e.kind != Defect::EdgeConflict) {
                result.failed_agents = solve_set;
                return result;
            }
        }
        candidate.soft_conflicts = report.conflict_count();
    }
    result.found = true;
    result.candidate = std::move(candidate);
    return result;
}

}  // namespace tapfpc

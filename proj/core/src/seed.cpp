#include <algorithm>
#include <chrono>

#include "tapfpc/seed.hpp"

namespace tapfpc {

namespace {

// Two agents whose final tasks share a goal vertex can never both park
// there, so no collision-free plan exists for such an assignment. Merge
// the colliding tails onto one agent wherever precedence allows.
void resolve_parking_conflicts(const Instance& instance, Assignment& assignment) {
    const int m = instance.num_tasks();
    DagReachability reach(instance.precedence, m);

    auto try_move_last = [&](int from, int to) {
        auto& src = assignment.sequences[from];
        auto& dst = assignment.sequences[to];
        const int task = src.back();
        for (int pos = (int)dst.size(); pos >= 0; --pos) {
            bool ok = true;
            for (int i = 0; i < pos && ok; ++i)
                if (reach.reaches(task, dst[i])) ok = false;
            for (int i = pos; i < (int)dst.size() && ok; ++i)
                if (reach.reaches(dst[i], task)) ok = false;
            if (ok) {
                dst.insert(dst.begin() + pos, task);
                src.pop_back();
                return true;
            }
        }
        return false;
    };

    for (int round = 0; round < 2 * m; ++round) {
        int agent_a = -1, agent_b = -1;
        for (int a = 0; a < instance.num_agents() && agent_a < 0; ++a) {
            if (assignment.sequences[a].empty()) continue;
            const int goal = instance.task_goal(assignment.sequences[a].back());
            for (int b = a + 1; b < instance.num_agents(); ++b) {
                if (assignment.sequences[b].empty()) continue;
                if (instance.task_goal(assignment.sequences[b].back()) == goal) {
                    agent_a = a;
                    agent_b = b;
                    break;
                }
            }
        }
        if (agent_a < 0) return;
        if (!try_move_last(agent_b, agent_a) && !try_move_last(agent_a, agent_b))
            return;  // unresolvable here; the solve will report failure
    }
}

}  // namespace

Assignment greedy_assign(const Instance& instance, DistanceTable& dist) {
    const int k = instance.num_agents();
    const int m = instance.num_tasks();
    auto preds = instance.precedence.predecessors_adjacency(m);
    auto succs = instance.precedence.successors_adjacency(m);

    Assignment assignment;
    assignment.sequences.resize(k);

    std::vector<int> unassigned_preds(m, 0);
    for (int t = 0; t < m; ++t) unassigned_preds[t] = (int)preds[t].size();
    std::vector<bool> assigned(m, false);
    std::vector<int> estimate(m, 0);       // estimated completion per assigned task
    std::vector<int> agent_finish(k, 0);   // estimated finish of each agent's partial sequence
    std::vector<int> agent_at(k);          // last goal (or start) per agent
    for (int a = 0; a < k; ++a) agent_at[a] = instance.agent_start(a);

    for (int placed = 0; placed < m; ++placed) {
        int best_task = -1, best_agent = -1, best_est = kInf;
        for (int t = 0; t < m; ++t) {
            if (assigned[t] || unassigned_preds[t] > 0) continue;
            int release = 0;
            for (int p : preds[t]) release = std::max(release, estimate[p] + 1);
            for (int a = 0; a < k; ++a) {
                const int leg = dist.distance(agent_at[a], instance.task_goal(t));
                if (leg >= kInf) continue;
                const int travel =
                    agent_finish[a] + (assignment.sequences[a].empty() ? leg : std::max(leg, 1));
                const int est = std::max(travel, release);
                if (est < best_est || (est == best_est && (a < best_agent ||
                                                           (a == best_agent && t < best_task)))) {
                    best_est = est;
                    best_task = t;
                    best_agent = a;
                }
            }
        }
        if (best_task < 0)
            // Unreachable goal for every agent; fall back to agent 0 so the
            // result stays a partition (the solve will report infeasibility).
            for (int t = 0; t < m; ++t)
                if (!assigned[t] && unassigned_preds[t] == 0) {
                    best_task = t;
                    best_agent = 0;
                    best_est = kInf;
                    break;
                }

        assignment.sequences[best_agent].push_back(best_task);
        assigned[best_task] = true;
        estimate[best_task] = best_est;
        agent_finish[best_agent] = best_est;
        agent_at[best_agent] = instance.task_goal(best_task);
        for (int s : succs[best_task]) --unassigned_preds[s];
    }
    resolve_parking_conflicts(instance, assignment);
    return assignment;
}

bool assemble_full_solution(const Instance& instance, const Assignment& assignment,
                            const PbsResult& pbs, Solution& out) {
    if (!pbs.found) return false;
    out = Solution{};
    out.assignment = assignment;
    out.paths.resize(instance.num_agents());
    for (int i = 0; i < (int)pbs.agents.size(); ++i) out.paths[pbs.agents[i]] = pbs.paths[i];
    for (auto& path : out.paths)
        if (path.vertices.empty()) return false;
    if (!retime_solution(instance, out)) return false;
    out.soft_conflicts = 0;
    return true;
}

SeedResult build_seed(const Instance& instance, const SeedOptions& options, DistanceTable& dist) {
    SeedResult result;
    const auto t0 = std::chrono::steady_clock::now();

    Assignment assignment = options.forced_assignment ? *options.forced_assignment
                                                      : greedy_assign(instance, dist);

    std::vector<int> all_agents(instance.num_agents());
    for (int a = 0; a < instance.num_agents(); ++a) all_agents[a] = a;

    PbsOptions pbs_options = options.pbs;
    pbs_options.low_level = LowLevel::MlaStar;
    pbs_options.mode = ConflictMode::Hard;

    PbsResult pbs = solve_pbs_pc(instance, assignment, all_agents, nullptr, pbs_options, dist);
    if (assemble_full_solution(instance, assignment, pbs, result.solution)) {
        ValidationReport report = validate_solution(instance, result.solution);
        result.found = report.ok();
    }
    result.seed_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace tapfpc

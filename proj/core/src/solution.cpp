#include "tapfpc/solution.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace tapfpc {

using json = nlohmann::ordered_json;

bool Assignment::is_partition(int num_tasks) const {
    std::vector<int> count(num_tasks, 0);
    for (const auto& seq : sequences)
        for (int t : seq) {
            if (t < 0 || t >= num_tasks) return false;
            ++count[t];
        }
    return std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
}

std::vector<int> Assignment::owners(int num_tasks) const {
    std::vector<int> owner(num_tasks, -1);
    for (int a = 0; a < (int)sequences.size(); ++a)
        for (int t : sequences[a]) owner[t] = a;
    return owner;
}

int ValidationReport::conflict_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.kind == Defect::VertexConflict || e.kind == Defect::EdgeConflict) ++n;
    return n;
}

namespace {

const char* defect_name(Defect d) {
    switch (d) {
        case Defect::VertexConflict: return "vertex_conflict";
        case Defect::EdgeConflict: return "edge_conflict";
        case Defect::PrecedenceViolation: return "precedence_violation";
        case Defect::AgentOrderViolation: return "agent_order_violation";
        case Defect::GoalViolation: return "goal_violation";
        case Defect::PathDefect: return "path_defect";
    }
    return "unknown";
}

}  // namespace

std::string ValidationReport::to_json() const {
    json j;
    j["feasible"] = ok();
    j["entries"] = json::array();
    for (const auto& e : entries) {
        json entry;
        entry["kind"] = defect_name(e.kind);
        if (e.a >= 0) entry["agent"] = e.a;
        if (e.b >= 0) entry["other_agent"] = e.b;
        if (e.task_u >= 0) entry["task_u"] = e.task_u;
        if (e.task_v >= 0) entry["task_v"] = e.task_v;
        if (e.timestep >= 0) entry["timestep"] = e.timestep;
        entry["message"] = e.message;
        j["entries"].push_back(entry);
    }
    return j.dump(2) + "\n";
}

ValidationReport validate_solution(const Instance& instance, const Solution& sol) {
    ValidationReport report;
    auto add = [&report](Defect kind, int a, int b, int tu, int tv, int t, std::string msg) {
        report.entries.push_back({kind, a, b, tu, tv, t, std::move(msg)});
    };
    const int k = instance.num_agents();
    const int m = instance.num_tasks();

    if ((int)sol.paths.size() != k || (int)sol.assignment.sequences.size() != k) {
        add(Defect::PathDefect, -1, -1, -1, -1, -1, "solution agent count does not match instance");
        return report;
    }

    // Partition of the task set.
    {
        std::vector<int> count(m, 0);
        for (const auto& seq : sol.assignment.sequences)
            for (int t : seq) {
                if (t < 0 || t >= m) {
                    add(Defect::GoalViolation, -1, -1, t, -1, -1, "assignment references unknown task");
                    return report;
                }
                ++count[t];
            }
        for (int t = 0; t < m; ++t)
            if (count[t] != 1)
                add(Defect::GoalViolation, -1, -1, t, -1, -1,
                    count[t] == 0 ? "task is unassigned" : "task assigned more than once");
    }

    // Path structure: start anchoring, passability, unit moves.
    int makespan = 0;
    for (int a = 0; a < k; ++a) {
        const auto& path = sol.paths[a].vertices;
        if (path.empty()) {
            add(Defect::PathDefect, a, -1, -1, -1, -1, "empty path");
            continue;
        }
        if (path[0] != instance.agent_start(a))
            add(Defect::PathDefect, a, -1, -1, -1, 0, "path does not begin at the agent start");
        for (int t = 0; t < (int)path.size(); ++t) {
            if (path[t] < 0 || path[t] >= instance.map.size() || !instance.map.passable(path[t])) {
                add(Defect::PathDefect, a, -1, -1, -1, t, "path visits a blocked or invalid cell");
                break;
            }
            if (t > 0 && !instance.map.adjacent_or_equal(path[t - 1], path[t])) {
                add(Defect::PathDefect, a, -1, -1, -1, t, "path step is neither a wait nor a unit move");
                break;
            }
        }
        makespan = std::max(makespan, (int)path.size());
    }
    if (!report.ok()) return report;  // conflict scan needs structurally sound paths

    for (int t = 0; t < m; ++t)
        makespan = std::max(makespan, sol.timings[t].completion + 1);

    // Vertex and edge conflicts over padded paths.
    for (int t = 0; t < makespan; ++t) {
        std::unordered_map<int, int> occupied;  // vertex -> agent
        for (int a = 0; a < k; ++a) {
            int v = sol.paths[a].at(t);
            auto [it, fresh] = occupied.emplace(v, a);
            if (!fresh)
                add(Defect::VertexConflict, it->second, a, -1, -1, t,
                    "two agents occupy vertex " + std::to_string(v));
        }
        if (t == 0) continue;
        for (int a = 0; a < k; ++a) {
            for (int b = a + 1; b < k; ++b) {
                int au = sol.paths[a].at(t - 1), av = sol.paths[a].at(t);
                int bu = sol.paths[b].at(t - 1), bv = sol.paths[b].at(t);
                if (au != av && au == bv && av == bu)
                    add(Defect::EdgeConflict, a, b, -1, -1, t,
                        "agents swap across edge (" + std::to_string(au) + "," + std::to_string(av) + ")");
            }
        }
    }

    // Task timings: visits, waiting in place, per-agent order.
    if ((int)sol.timings.size() != m) {
        add(Defect::GoalViolation, -1, -1, -1, -1, -1, "timing table size does not match task count");
        return report;
    }
    for (int a = 0; a < k; ++a) {
        int prev_completion = -1;
        int prev_task = -1;
        for (int task : sol.assignment.sequences[a]) {
            const auto& tt = sol.timings[task];
            const int goal = instance.task_goal(task);
            if (tt.arrival < 0 || tt.completion < tt.arrival) {
                add(Defect::GoalViolation, a, -1, task, -1, -1, "task has no valid recorded timing");
                continue;
            }
            if (tt.arrival <= prev_completion)
                add(Defect::AgentOrderViolation, a, -1, prev_task, task, tt.arrival,
                    "visit begins before the previous task completed");
            if (prev_completion >= tt.completion)
                add(Defect::AgentOrderViolation, a, -1, prev_task, task, tt.completion,
                    "per-agent completion order is not strictly increasing");
            for (int t = tt.arrival; t <= tt.completion; ++t) {
                if (sol.paths[a].at(t) != goal) {
                    add(Defect::GoalViolation, a, -1, task, -1, t,
                        "agent is not at the task goal between arrival and completion");
                    break;
                }
            }
            prev_completion = tt.completion;
            prev_task = task;
        }
    }

    // Global precedence: strictly increasing completions along every edge.
    for (auto [u, v] : instance.precedence.edges()) {
        if (sol.timings[u].completion >= sol.timings[v].completion)
            add(Defect::PrecedenceViolation, -1, -1, u, v, sol.timings[v].completion,
                "predecessor completes at " + std::to_string(sol.timings[u].completion) +
                    ", successor at " + std::to_string(sol.timings[v].completion));
    }
    return report;
}

int sum_of_costs(const Solution& sol) {
    int soc = 0;
    for (const auto& seq : sol.assignment.sequences)
        if (!seq.empty()) soc += sol.timings[seq.back()].completion;
    return soc;
}

int precedence_wait(const Solution& sol, int task_id) {
    if (task_id < 0 || task_id >= (int)sol.timings.size() || sol.timings[task_id].arrival < 0)
        throw std::runtime_error("precedence_wait: task " + std::to_string(task_id) +
                                 " has no recorded timing");
    return sol.timings[task_id].completion - sol.timings[task_id].arrival;
}

int total_precedence_wait(const Solution& sol) {
    int total = 0;
    for (const auto& tt : sol.timings)
        if (tt.arrival >= 0) total += tt.completion - tt.arrival;
    return total;
}

int edge_slack(const Solution& sol, int task_u, int task_v) {
    return sol.timings[task_v].arrival - sol.timings[task_u].completion;
}

ImprovementMetrics improvement_metrics(int seed_soc, int final_soc, int seed_wait, int final_wait) {
    ImprovementMetrics m;
    m.delta_soc = seed_soc - final_soc;
    m.relative_reduction_pct = seed_soc > 0 ? 100.0 * m.delta_soc / seed_soc : 0.0;
    m.improved = m.delta_soc > 0;
    m.wait_reduction = seed_wait - final_wait;
    m.wait_reduction_pct = seed_wait > 0 ? 100.0 * m.wait_reduction / seed_wait : 0.0;
    return m;
}

std::string write_solution(const Instance& instance, const Solution& sol) {
    json j;
    j["assignment"] = sol.assignment.sequences;
    j["paths"] = json::array();
    for (const auto& p : sol.paths) {
        json path = json::array();
        for (int v : p.vertices) path.push_back({instance.map.col_of(v), instance.map.row_of(v)});
        j["paths"].push_back(path);
    }
    j["timings"] = json::array();
    for (const auto& t : sol.timings)
        j["timings"].push_back({{"arrival", t.arrival}, {"completion", t.completion}});
    j["soc"] = sol.soc;
    j["soft_conflicts"] = sol.soft_conflicts;
    return j.dump(2) + "\n";
}

Solution read_solution(const Instance& instance, const std::string& text) {
    json j = json::parse(text);
    Solution sol;
    sol.assignment.sequences = j.at("assignment").get<std::vector<std::vector<int>>>();
    int agent = 0;
    for (const auto& path : j.at("paths")) {
        TimedPath tp;
        tp.owner = agent++;
        for (const auto& cell : path) {
            int col = cell.at(0).get<int>();
            int row = cell.at(1).get<int>();
            if (!instance.map.in_bounds(col, row))
                throw std::runtime_error("solution path leaves the map");
            tp.vertices.push_back(instance.map.index(col, row));
        }
        sol.paths.push_back(std::move(tp));
    }
    for (const auto& t : j.at("timings"))
        sol.timings.push_back({t.at("arrival").get<int>(), t.at("completion").get<int>()});
    sol.soc = j.at("soc").get<int>();
    if (j.contains("soft_conflicts")) sol.soft_conflicts = j.at("soft_conflicts").get<int>();
    return sol;
}

bool retime_solution(const Instance& instance, Solution& sol) {
    const int m = instance.num_tasks();
    const int k = instance.num_agents();
    if ((int)sol.assignment.sequences.size() != k) return false;
    if (!sol.assignment.is_partition(m)) return false;

    // Dependency graph: precedence edges plus same-agent sequence edges.
    std::vector<std::vector<int>> succ = instance.precedence.successors_adjacency(m);
    std::vector<int> indegree(m, 0);
    for (auto [u, v] : instance.precedence.edges()) {
        (void)u;
        ++indegree[v];
    }
    std::vector<int> owner(m, -1), seq_prev(m, -1);
    for (int a = 0; a < k; ++a) {
        const auto& seq = sol.assignment.sequences[a];
        for (int i = 0; i < (int)seq.size(); ++i) {
            owner[seq[i]] = a;
            if (i > 0) {
                succ[seq[i - 1]].push_back(seq[i]);
                ++indegree[seq[i]];
                seq_prev[seq[i]] = seq[i - 1];
            }
        }
    }

    std::vector<int> ready;
    for (int t = 0; t < m; ++t)
        if (indegree[t] == 0) ready.push_back(t);

    sol.timings.assign(m, TaskTiming{});
    auto preds = instance.precedence.predecessors_adjacency(m);
    int done = 0;
    while (!ready.empty()) {
        int task = ready.back();
        ready.pop_back();
        ++done;

        const int a = owner[task];
        const auto& path = sol.paths[a];
        const int goal = instance.task_goal(task);
        const int after = seq_prev[task] >= 0 ? sol.timings[seq_prev[task]].completion : -1;
        int release = 0;
        for (int p : preds[task]) release = std::max(release, sol.timings[p].completion + 1);

        // First occupancy block of the goal after the previous completion
        // that lasts through the release. Blocks reaching the end of the
        // recorded path extend forever (the agent parks there).
        const int last = (int)path.vertices.size() - 1;
        const int scan_end = std::max(last, after + 1);
        int t = after + 1;
        bool placed = false;
        while (t <= scan_end) {
            if (path.at(t) != goal) {
                ++t;
                continue;
            }
            int block_start = t;
            int block_end = t;
            while (block_end < last && path.vertices[block_end + 1] == goal) ++block_end;
            if (block_end >= last) block_end = kInf;
            int completion = std::max(block_start, release);
            if (completion <= block_end) {
                sol.timings[task] = {block_start, completion};
                placed = true;
                break;
            }
            t = block_end + 1;
        }
        if (!placed) return false;

        for (int s : succ[task])
            if (--indegree[s] == 0) ready.push_back(s);
    }
    if (done != m) return false;  // combined order+precedence relation is cyclic

    sol.soc = sum_of_costs(sol);
    return true;
}

}  // namespace tapfpc

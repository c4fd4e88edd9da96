#pragma once

#include <string>
#include <vector>

#include "tapfpc/instance.hpp"

namespace tapfpc {

// Per-agent ordered task-id sequences; together they partition the task set.
struct Assignment {
    std::vector<std::vector<int>> sequences;

    int num_agents() const { return (int)sequences.size(); }
    bool is_partition(int num_tasks) const;
    // agent owning each task, -1 where unassigned (not a valid partition).
    std::vector<int> owners(int num_tasks) const;
};

// Vertex per timestep, starting at the owner's start at t = 0. Consecutive
// entries are equal (wait) or grid-adjacent (move). Timesteps beyond the
// recorded end mean the agent is parked at the final vertex.
struct TimedPath {
    int owner = -1;
    std::vector<int> vertices;

    int at(int t) const {
        if (vertices.empty()) return -1;
        return t < (int)vertices.size() ? vertices[t] : vertices.back();
    }
    int length() const { return (int)vertices.size(); }
};

struct TaskTiming {
    int arrival = -1;     // timestep the agent reaches the goal for this visit
    int completion = -1;  // timestep the task counts as completed
};

struct Solution {
    Assignment assignment;
    std::vector<TimedPath> paths;    // one per agent
    std::vector<TaskTiming> timings; // one per task
    int soc = 0;
    int soft_conflicts = 0;  // residual boundary conflicts; 0 in valid solutions
};

enum class Defect {
    VertexConflict,
    EdgeConflict,
    PrecedenceViolation,
    AgentOrderViolation,
    GoalViolation,
    PathDefect,
};

struct ValidationEntry {
    Defect kind;
    int a = -1, b = -1;      // agent ids (b = -1 when single-agent)
    int task_u = -1, task_v = -1;
    int timestep = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;

    bool ok() const { return entries.empty(); }
    int conflict_count() const;  // vertex + edge conflicts only
    std::string to_json() const;
};

// Checks every feasibility condition: vertex/edge conflicts between padded
// paths, precedence and per-agent order, goal visits at the recorded times,
// path continuity, and the assignment partition. Empty report iff feasible.
ValidationReport validate_solution(const Instance& instance, const Solution& sol);

// Sum over agents of the completion time of the last assigned task;
// agents with empty sequences contribute 0.
int sum_of_costs(const Solution& sol);

// completion - arrival: time spent idling at the goal for predecessors.
// Throws if the task has no recorded timing.
int precedence_wait(const Solution& sol, int task_id);

// Total precedence wait across all timed tasks.
int total_precedence_wait(const Solution& sol);

// arrival(v) - completion(u) for a precedence edge (u, v); negative when
// the successor arrived early and waited.
int edge_slack(const Solution& sol, int task_u, int task_v);

struct ImprovementMetrics {
    int delta_soc = 0;
    double relative_reduction_pct = 0.0;
    bool improved = false;
    int wait_reduction = 0;
    double wait_reduction_pct = 0.0;
};

ImprovementMetrics improvement_metrics(int seed_soc, int final_soc, int seed_wait, int final_wait);

// Solution JSON round trip (assignment, paths as [col,row] pairs, per-task
// timings, soc).
std::string write_solution(const Instance& instance, const Solution& sol);
Solution read_solution(const Instance& instance, const std::string& text);

// Recomputes task arrivals/completions from paths under the rule that a
// task completes at the first timestep >= its arrival that is strictly
// later than every predecessor completion, with the agent waiting in place
// at the goal. Returns false when the paths cannot realize the assignment.
bool retime_solution(const Instance& instance, Solution& sol);

}  // namespace tapfpc

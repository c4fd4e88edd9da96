#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "tapfpc/instance.hpp"
#include "tapfpc/reservation.hpp"
#include "tapfpc/solution.hpp"

namespace tapfpc {

// Per-stage completion-time window for an ordered goal sequence.
// lower[j] <= completion(stage j) <= upper[j]; upper kInf when unbounded.
struct StageBounds {
    std::vector<int> lower;
    std::vector<int> upper;

    static StageBounds unbounded(int stages) {
        return {std::vector<int>(stages, 0), std::vector<int>(stages, kInf)};
    }
    bool feasible() const {
        for (size_t j = 0; j < lower.size(); ++j)
            if (lower[j] > upper[j]) return false;
        return true;
    }
};

struct TimedPlanResult {
    bool found = false;
    TimedPath path;
    std::vector<int> stage_completions;
    int soft_conflicts = 0;
    int expanded = 0;

    int completion_time() const {
        return stage_completions.empty() ? 0 : stage_completions.back();
    }
};

// Shared horizon rule so MLA* and SIPPS agree on what counts as infeasible.
int plan_horizon(const GridMap& map, const ReservationTable& res, const StageBounds& bounds,
                 int num_stages, int start_time);

// Multi-Label A* over (vertex, stage, time) states: minimum-completion-time
// path visiting the goals in order, each stage completing inside its bounds
// (early arrivals wait; stages whose upper bound passed prune the branch),
// avoiding every hard reservation. Soft reservations are ignored.
// The returned path is indexed from start_time; all times are absolute.
TimedPlanResult plan_mla_star(const GridMap& map, int start, const std::vector<int>& goals,
                              const StageBounds& bounds, const ReservationTable& res,
                              DistanceTable& dist, int start_time = 0);

// Safe Interval Path Planning with Soft constraints, stage-indexed. Safe
// intervals come from hard reservations only; soft reservations split the
// intervals and annotate them with collision counts. Lexicographic
// objective (soft conflicts, completion time); ties break on fewer waits,
// then smaller vertex index.
TimedPlanResult plan_sipps(const GridMap& map, int start, const std::vector<int>& goals,
                           const StageBounds& bounds, const ReservationTable& res,
                           DistanceTable& dist, int start_time = 0);

// Shortest conflict-free plan for an agent with no assigned tasks: reach
// any vertex where it can park forever without hitting a hard reservation.
TimedPlanResult plan_evasion(const GridMap& map, int start, const ReservationTable& res,
                             int start_time = 0);

// Acyclic partial order over agent ids used by the PBS high-level search.
class PriorityOrder {
public:
    bool add(int high, int low);  // false if it would create a cycle
    bool higher(int a, int b) const;  // a (transitively) above b
    const std::set<std::pair<int, int>>& pairs() const { return pairs_; }
    // Agents sorted so every agent appears after all higher-priority ones;
    // ties by ascending id.
    std::vector<int> planning_order(const std::vector<int>& agents) const;

private:
    std::set<std::pair<int, int>> pairs_;  // (high, low)
};

// Completion-time context for deriving stage bounds: the current estimate
// per task, and whether that estimate is frozen (exterior, authoritative)
// or interior (subject to replanning).
struct TimingContext {
    std::vector<int> completion;   // per task; kInf when unknown
    std::vector<bool> frozen;      // per task
};

// Release and deadline windows for one agent's task sequence. Lower bounds
// take 1 + max over predecessor completions outside the sequence; upper
// bounds mirror frozen successors at T as T - 1. Forward propagation adds
// the inter-goal grid distance (at least 1) between consecutive stages;
// the symmetric backward pass tightens uppers the same way.
StageBounds derive_stage_bounds(const std::vector<int>& sequence, const Instance& instance,
                                const TimingContext& timing, DistanceTable& dist, int start,
                                int start_time = 0);

enum class LowLevel { MlaStar, Sipps };
enum class ConflictMode { Hard, Relaxed };

struct PbsOptions {
    LowLevel low_level = LowLevel::MlaStar;
    ConflictMode mode = ConflictMode::Hard;
    int max_high_level_nodes = 5000;
    double time_limit_secs = 2.0;
    int max_replans_per_node = 0;  // 0: derived from agent count
};

struct PbsResult {
    bool found = false;
    // Paths and stage completions for the planned agents only.
    std::vector<int> agents;
    std::vector<TimedPath> paths;
    std::vector<std::vector<int>> stage_completions;
    int soc = 0;             // over planned agents
    int soft_conflicts = 0;  // vs exterior, relaxed mode only
    int high_level_nodes = 0;
};

// Frozen surroundings for a neighborhood solve: paths of every agent that
// keeps its current plan, plus authoritative completion times of their
// tasks. Parked tails are always hard; in relaxed mode the moving portions
// become soft.
struct ExteriorContext {
    std::vector<TimedPath> paths;           // paths of frozen agents
    std::vector<int> frozen_completions;    // per task, -1 where not frozen
};

// Priority-Based Search for fixed-sequence MAPF-PC: depth-first search over
// priority orderings; each agent plans against higher-priority paths and
// the frozen exterior; timing invalidations cascade replans; conflicts
// between unordered agents branch on the two orderings.
PbsResult solve_pbs_pc(const Instance& instance, const Assignment& assignment,
                       const std::vector<int>& mutable_agents, const ExteriorContext* exterior,
                       const PbsOptions& options, DistanceTable& dist);

}  // namespace tapfpc

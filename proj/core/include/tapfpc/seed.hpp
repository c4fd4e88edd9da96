#pragma once

#include <optional>

#include "tapfpc/planner.hpp"
#include "tapfpc/solution.hpp"

namespace tapfpc {

// Precedence-aware greedy construction: repeatedly assigns a ready task
// (all predecessors already assigned) to the agent whose estimated finish
// after appending it is smallest. Ties break by estimate, agent id, task id.
Assignment greedy_assign(const Instance& instance, DistanceTable& dist);

struct SeedOptions {
    // Tests and reproductions can inject a fixed assignment instead of the
    // greedy one.
    std::optional<Assignment> forced_assignment;
    PbsOptions pbs;
};

struct SeedResult {
    bool found = false;
    Solution solution;
    double seed_secs = 0.0;  // recorded separately from any search budget
};

// Fixed-assignment MAPF-PC solve of the full instance (MLA* low level,
// hard conflicts) over the greedy (or forced) assignment. The returned
// solution is validated; failure marks the instance unseeded.
SeedResult build_seed(const Instance& instance, const SeedOptions& options, DistanceTable& dist);

// Retimes and wraps a PBS result over the full instance into a Solution.
bool assemble_full_solution(const Instance& instance, const Assignment& assignment,
                            const PbsResult& pbs, Solution& out);

}  // namespace tapfpc

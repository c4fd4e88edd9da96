#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "tapfpc/planner.hpp"
#include "tapfpc/seed.hpp"
#include "tapfpc/solution.hpp"

namespace tapfpc {

enum class DestroyOp : int {
    Random = 0,
    WorstCost,
    TaskConflict,
    Shaw,
    PrecedenceWait,
    LowSlack,
    AgentConflict,
    FailureRecovery,
};
constexpr int kNumDestroyOps = 8;
const char* destroy_op_name(DestroyOp op);

// Roulette-wheel destroy selection with reward-based weight updates.
struct OperatorPortfolio {
    std::array<double, kNumDestroyOps> weights;
    double reaction = 0.35;

    OperatorPortfolio() { weights.fill(1.0); }
};

enum class RepairOutcome { NewBest, ImprovedIncumbent, Accepted, Rejected, Failed };

DestroyOp select_operator(const OperatorPortfolio& portfolio, std::mt19937_64& rng);
void update_weights(OperatorPortfolio& portfolio, DestroyOp op, RepairOutcome outcome);

// Hints accumulated from recent iterations for the agent-seeded operators.
struct DestroyDiagnostics {
    std::deque<std::pair<int, int>> conflict_agents;   // (iteration, agent)
    std::deque<std::pair<int, int>> conflict_vertices; // (iteration, vertex)
    std::vector<int> last_failure_agents;
    int window = 25;

    void record_conflict(int iteration, int agent_a, int agent_b, int vertex);
    void trim(int iteration);
};

// Draws the destroy seed set per the operator's rule; never empty.
std::vector<int> seed_tasks(DestroyOp op, const Instance& instance, const Solution& incumbent,
                            const DestroyDiagnostics& diagnostics, int size, DistanceTable& dist,
                            std::mt19937_64& rng);

// Destroyed neighborhood: successor-closed removed set, patched exterior,
// and release bounds implied by frozen predecessors.
struct Neighborhood {
    bool failed = false;
    std::vector<int> seed_set;
    std::vector<int> destroyed;        // successor-closed, ascending
    std::vector<int> boundary_tasks;   // surviving immediate same-agent followers
    std::vector<int> owner_agents;     // agents that lost at least one task
    Solution exterior;                 // incumbent minus destroyed tasks, legs repatched
    std::vector<int> release_bound;    // per task; meaningful for destroyed ones
};

// Removes the closure of the seed set from the incumbent, replans boundary
// legs with MLA*, retimes surviving tasks, and computes release bounds.
Neighborhood close_and_excise(const Instance& instance, const Solution& incumbent,
                              const std::vector<int>& seed_set, DistanceTable& dist);

enum class RepairScope { Local, Global };

struct RepairProposal {
    bool failed = false;
    std::vector<int> mutable_agents;             // insertion candidates (scope-dependent)
    std::vector<std::vector<int>> sequences;     // proposed sequence per agent (all agents)
    std::vector<int> approx_completion;          // per task, kInf where unknown
};

// Static insertion of the destroyed tasks, processed in a fixed topological
// order (ready tasks by ascending release bound, then id); each task takes
// the admissible (agent, position) with the smallest detour score.
RepairProposal build_proposal(const Instance& instance, const Neighborhood& nbhd,
                              RepairScope scope, int local_agent_radius, DistanceTable& dist);

struct RepairResult {
    bool found = false;
    Solution candidate;
    std::vector<int> failed_agents;  // populated on solver failure
};

// Greedy reinsertion by regret-2 scores: repeatedly computes feasible
// insertion spots for every pending destroyed task (cost = realized SoC
// increase of an MLA* replan), inserts the task with the largest gap
// between best and second-best cost, and commits the replanned path.
RepairResult repair_regret(const Instance& instance, const Neighborhood& nbhd,
                           const PbsOptions& solver_options, DistanceTable& dist);

// Solves the proposal as a MAPF-PC subproblem over the changed agents with
// SIPPS against the frozen exterior, then stitches the result back in.
RepairResult repair_neighborhood(const Instance& instance, const Neighborhood& nbhd,
                                 const RepairProposal& proposal, const PbsOptions& solver_options,
                                 DistanceTable& dist);

struct AcceptanceState {
    double initial_temperature = 0.0;  // 0.05 * seed SoC
    double cooling = 0.99975;
    int iteration = 0;
    ConflictMode rule = ConflictMode::Hard;

    double temperature() const;
};

// Threshold acceptance: accept iff J(candidate) < J(incumbent) + T; the
// relaxed rule additionally requires no worsening of the conflict count.
// The temperature decays exactly once per call.
bool accept_candidate(const Solution& candidate, const Solution& incumbent,
                      AcceptanceState& state);

enum class RepairKind { Regret, Neighborhood };

struct LnsConfig {
    int destroy_seed_size = 2;
    RepairKind repair = RepairKind::Neighborhood;
    RepairScope scope = RepairScope::Global;
    ConflictMode mode = ConflictMode::Hard;
    int local_agent_radius = 2;
    double budget_secs = 0.0;  // wall-clock budget for the main loop
    int budget_iters = 0;      // iteration budget; takes precedence when > 0
    std::uint64_t rng_seed = 0;
    PbsOptions solver;         // per-repair limits
    std::optional<Assignment> forced_seed_assignment;
};

struct IterationRecord {
    int iteration = 0;
    std::int64_t wall_ms = 0;  // 0 under iteration budgets (reproducible traces)
    DestroyOp op = DestroyOp::Random;
    RepairOutcome outcome = RepairOutcome::Failed;
    int candidate_soc = -1;
    int incumbent_soc = 0;
    int best_soc = 0;
    double temperature = 0.0;
};

struct PhaseTimers {
    double seed = 0, destroy = 0, proposal = 0, solve = 0, validate = 0, post_refine = 0;
};

struct OperatorStats {
    int uses = 0, improvements = 0, new_bests = 0, failures = 0;
};

struct RunTrace {
    std::vector<IterationRecord> iterations;
    PhaseTimers timers;
    std::array<OperatorStats, kNumDestroyOps> operators{};
    int seed_soc = 0;
    int final_soc = 0;
    int seed_wait = 0;
    int final_wait = 0;
    bool seeded = false;

    std::string to_csv() const;
    std::string summary_json() const;
};

struct LnsResult {
    bool found = false;
    Solution best;
    RunTrace trace;
};

// The full search: seed, iterate destroy/repair/accept until the budget is
// exhausted, then post-refine the best solution found.
LnsResult run_lns(const Instance& instance, const LnsConfig& config);

// Full-instance MAPF-PC solve with the discovered assignment held fixed;
// returns the refined solution only when it strictly improves, otherwise
// best is returned unchanged.
Solution post_refine(const Instance& instance, const Solution& best, const PbsOptions& options,
                     DistanceTable& dist);

}  // namespace tapfpc

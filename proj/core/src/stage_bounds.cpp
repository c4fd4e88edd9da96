#include <algorithm>

#include "tapfpc/planner.hpp"

namespace tapfpc {

StageBounds derive_stage_bounds(const std::vector<int>& sequence, const Instance& instance,
                                const TimingContext& timing, DistanceTable& dist, int start,
                                int start_time) {
    const int stages = (int)sequence.size();
    StageBounds bounds = StageBounds::unbounded(stages);
    if (stages == 0) return bounds;

    const int m = instance.num_tasks();
    auto preds = instance.precedence.predecessors_adjacency(m);
    auto succs = instance.precedence.successors_adjacency(m);

    std::vector<bool> in_sequence(m, false);
    for (int t : sequence) in_sequence[t] = true;

    for (int j = 0; j < stages; ++j) {
        const int task = sequence[j];
        // Same-agent predecessors are implied by the stage order itself.
        for (int p : preds[task]) {
            if (in_sequence[p]) continue;
            if (timing.completion[p] >= kInf) continue;  // unknown, no bound yet
            bounds.lower[j] = std::max(bounds.lower[j], timing.completion[p] + 1);
        }
        for (int s : succs[task]) {
            if (in_sequence[s]) continue;
            if (!timing.frozen[s]) continue;  // only frozen successors impose deadlines
            bounds.upper[j] = std::min(bounds.upper[j], timing.completion[s] - 1);
        }
    }

    // Travel-time propagation: a stage cannot complete before the previous
    // one plus the distance between the two goals (one step minimum since
    // completions are strictly increasing).
    int prev_vertex = start;
    for (int j = 0; j < stages; ++j) {
        const int goal = instance.task_goal(sequence[j]);
        const int leg = dist.distance(prev_vertex, goal);
        if (leg >= kInf) {
            bounds.lower[j] = kInf;  // unreachable leg; caller sees infeasible
        } else if (j == 0) {
            bounds.lower[j] = std::max(bounds.lower[j], start_time + leg);
        } else {
            const int step = std::max(leg, 1);
            if (bounds.lower[j - 1] < kInf)
                bounds.lower[j] = std::max(bounds.lower[j], bounds.lower[j - 1] + step);
        }
        prev_vertex = goal;
    }
    for (int j = stages - 2; j >= 0; --j) {
        if (bounds.upper[j + 1] >= kInf) continue;
        const int leg = dist.distance(instance.task_goal(sequence[j]),
                                      instance.task_goal(sequence[j + 1]));
        const int step = leg >= kInf ? 1 : std::max(leg, 1);
        bounds.upper[j] = std::min(bounds.upper[j], bounds.upper[j + 1] - step);
    }
    return bounds;
}

}  // namespace tapfpc

#include <algorithm>

#include "tapfpc/lns.hpp"

namespace tapfpc {

Neighborhood close_and_excise(const Instance& instance, const Solution& incumbent,
                              const std::vector<int>& seed_set, DistanceTable& dist) {
    const int m = instance.num_tasks();
    const int k = instance.num_agents();

    Neighborhood nbhd;
    nbhd.seed_set = seed_set;
    std::sort(nbhd.seed_set.begin(), nbhd.seed_set.end());
    nbhd.seed_set.erase(std::unique(nbhd.seed_set.begin(), nbhd.seed_set.end()),
                        nbhd.seed_set.end());
    nbhd.destroyed = transitive_successors(instance.precedence, m, nbhd.seed_set);
    nbhd.release_bound.assign(m, 0);

    std::vector<bool> destroyed(m, false);
    for (int t : nbhd.destroyed) destroyed[t] = true;

    // Excise destroyed tasks from the sequences; a survivor directly after a
    // destroyed run becomes a boundary task whose incoming leg is rebuilt.
    nbhd.exterior = incumbent;
    std::vector<int> first_destroyed_pos(k, -1);
    for (int a = 0; a < k; ++a) {
        const auto& old_seq = incumbent.assignment.sequences[a];
        std::vector<int> survivors;
        bool pending = false;
        for (int i = 0; i < (int)old_seq.size(); ++i) {
            if (destroyed[old_seq[i]]) {
                if (first_destroyed_pos[a] < 0) first_destroyed_pos[a] = i;
                pending = true;
            } else {
                if (pending) nbhd.boundary_tasks.push_back(old_seq[i]);
                pending = false;
                survivors.push_back(old_seq[i]);
            }
        }
        if (first_destroyed_pos[a] >= 0) nbhd.owner_agents.push_back(a);
        nbhd.exterior.assignment.sequences[a] = std::move(survivors);
    }
    for (int t : nbhd.destroyed) nbhd.exterior.timings[t] = TaskTiming{};

    // Patch each owner: keep the path up to the completion of the last
    // survivor before the destruction point, replan the surviving suffix
    // with MLA* against everyone else's current path, and retime it.
    for (int a : nbhd.owner_agents) {
        const auto& old_seq = incumbent.assignment.sequences[a];
        int cut_time = 0;
        int cut_vertex = instance.agent_start(a);
        std::vector<int> suffix;
        for (int i = 0; i < first_destroyed_pos[a]; ++i) {
            cut_time = incumbent.timings[old_seq[i]].completion;
            cut_vertex = instance.task_goal(old_seq[i]);
        }
        for (int i = first_destroyed_pos[a]; i < (int)old_seq.size(); ++i)
            if (!destroyed[old_seq[i]]) suffix.push_back(old_seq[i]);

        ReservationTable res;
        for (int b = 0; b < k; ++b)
            if (b != a) res.add_path(nbhd.exterior.paths[b]);

        TimedPlanResult plan;
        if (suffix.empty()) {
            plan = plan_evasion(instance.map, cut_vertex, res, cut_time);
        } else {
            TimingContext timing;
            timing.completion.assign(m, kInf);
            timing.frozen.assign(m, false);
            for (int t = 0; t < m; ++t) {
                if (destroyed[t]) continue;
                bool on_suffix = std::find(suffix.begin(), suffix.end(), t) != suffix.end();
                if (on_suffix) continue;
                timing.completion[t] = nbhd.exterior.timings[t].completion;
                timing.frozen[t] = true;
            }
            StageBounds bounds =
                derive_stage_bounds(suffix, instance, timing, dist, cut_vertex, cut_time);
            std::vector<int> goals;
            for (int t : suffix) goals.push_back(instance.task_goal(t));
            plan = plan_mla_star(instance.map, cut_vertex, goals, bounds, res, dist, cut_time);
        }
        if (!plan.found) {
            nbhd.failed = true;
            return nbhd;
        }

        auto& path = nbhd.exterior.paths[a].vertices;
        path.resize(cut_time + 1);
        path.insert(path.end(), plan.path.vertices.begin() + 1, plan.path.vertices.end());
        const bool has_prefix = first_destroyed_pos[a] > 0;
        for (int j = 0; j < (int)suffix.size(); ++j) {
            nbhd.exterior.timings[suffix[j]].completion = plan.stage_completions[j];
            // Arrival: start of the goal-occupancy block ending at completion.
            int arrival = plan.stage_completions[j];
            const int goal = instance.task_goal(suffix[j]);
            const int floor = j == 0 ? (has_prefix ? cut_time : -1) : plan.stage_completions[j - 1];
            while (arrival - 1 > floor && nbhd.exterior.paths[a].at(arrival - 1) == goal)
                --arrival;
            nbhd.exterior.timings[suffix[j]].arrival = arrival;
        }
    }

    // Release bounds from surviving predecessors.
    auto preds = instance.precedence.predecessors_adjacency(m);
    for (int t : nbhd.destroyed) {
        int bound = 0;
        for (int p : preds[t])
            if (!destroyed[p]) bound = std::max(bound, nbhd.exterior.timings[p].completion + 1);
        nbhd.release_bound[t] = bound;
    }

    nbhd.exterior.soc = sum_of_costs(nbhd.exterior);
    return nbhd;
}

}  // namespace tapfpc

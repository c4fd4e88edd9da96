#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>

#include "tapfpc/suite.hpp"

namespace tapfpc {

namespace {

// Exact joint-state solve for one fixed assignment. States are the agent
// positions plus the completed-task mask; a task completes when its owner
// stands on the goal, it is the next task of its sequence, and every DAG
// predecessor completed strictly earlier. Finished agents park; agents
// with no tasks move freely at zero cost. Returns kInf when unsolvable.
int solve_assignment_exact(const Instance& instance, const Assignment& assignment) {
    const int k = instance.num_agents();
    const int m = instance.num_tasks();
    const int cells = instance.map.size();
    auto preds = instance.precedence.predecessors_adjacency(m);

    std::vector<std::vector<int>> seq = assignment.sequences;

    auto stage_of = [&](int mask, int agent) {
        int stage = 0;
        while (stage < (int)seq[agent].size() && (mask >> seq[agent][stage] & 1)) ++stage;
        return stage;
    };
    // Intermediate tasks complete automatically (never harmful); an agent's
    // final task is optional because completing it parks the agent forever,
    // and deferring can be necessary to let the other agent through.
    auto completion_pass = [&](const std::vector<int>& pos, int old_mask,
                               std::vector<int>& optional) {
        int mask = old_mask;
        optional.clear();
        for (int a = 0; a < k; ++a) {
            const int stage = stage_of(old_mask, a);
            if (stage >= (int)seq[a].size()) continue;
            const int task = seq[a][stage];
            if (pos[a] != instance.task_goal(task)) continue;
            bool ready = true;
            for (int p : preds[task])
                if (!(old_mask >> p & 1)) ready = false;
            if (!ready) continue;
            if (stage + 1 == (int)seq[a].size())
                optional.push_back(task);
            else
                mask |= 1 << task;
        }
        return mask;
    };
    auto agent_done = [&](int mask, int agent) {
        return stage_of(mask, agent) >= (int)seq[agent].size();
    };

    auto encode = [&](const std::vector<int>& pos, int mask) {
        std::uint64_t key = mask;
        for (int a = 0; a < k; ++a) key = key * (std::uint64_t)cells + pos[a];
        return key;
    };

    const int full_mask = (1 << m) - 1;
    std::vector<int> start_pos(k);
    for (int a = 0; a < k; ++a) start_pos[a] = instance.agent_start(a);

    using QEntry = std::pair<int, std::uint64_t>;  // (cost, state)
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> open;
    std::unordered_map<std::uint64_t, int> dist;
    std::unordered_map<std::uint64_t, std::pair<std::vector<int>, int>> decode;

    auto push_state = [&](const std::vector<int>& pos, int base_mask, int g) {
        std::vector<int> optional;
        const int mandatory = completion_pass(pos, base_mask, optional);
        const int n_opt = (int)optional.size();
        for (int subset = 0; subset < (1 << n_opt); ++subset) {
            int mask = mandatory;
            for (int i = 0; i < n_opt; ++i)
                if (subset >> i & 1) mask |= 1 << optional[i];
            const std::uint64_t key = encode(pos, mask);
            auto it = dist.find(key);
            if (it == dist.end() || g < it->second) {
                dist[key] = g;
                decode[key] = {pos, mask};
                open.push({g, key});
            }
        }
    };

    push_state(start_pos, 0, 0);

    while (!open.empty()) {
        auto [g, key] = open.top();
        open.pop();
        if (dist[key] < g) continue;
        auto [pos, mask] = decode[key];
        if (mask == full_mask) return g;

        int movers = 0;
        for (int a = 0; a < k; ++a)
            if (!agent_done(mask, a) && !seq[a].empty()) ++movers;
        const int step_cost = movers;

        // Candidate moves per agent: parked agents stay, everyone else may
        // wait or step to a passable neighbor.
        std::vector<std::vector<int>> choices(k);
        for (int a = 0; a < k; ++a) {
            const bool parked = agent_done(mask, a) && !seq[a].empty();
            choices[a].push_back(pos[a]);
            if (!parked)
                for (int u : instance.map.neighbors(pos[a])) choices[a].push_back(u);
        }

        std::vector<int> pick(k, 0);
        while (true) {
            std::vector<int> next(k);
            for (int a = 0; a < k; ++a) next[a] = choices[a][pick[a]];
            bool ok = true;
            for (int a = 0; a < k && ok; ++a)
                for (int b = a + 1; b < k && ok; ++b) {
                    if (next[a] == next[b]) ok = false;
                    if (next[a] == pos[b] && next[b] == pos[a] && pos[a] != pos[b]) ok = false;
                }
            if (ok) push_state(next, mask, g + step_cost);
            int a = 0;
            for (; a < k; ++a) {
                if (++pick[a] < (int)choices[a].size()) break;
                pick[a] = 0;
            }
            if (a == k) break;
        }
    }
    return kInf;
}

// Enumerates per-agent orderings for one ownership vector.
void enumerate_orderings(const Instance& instance, const DagReachability& reach,
                         std::vector<std::vector<int>>& groups, int agent, Assignment& partial,
                         int& best) {
    const int k = instance.num_agents();
    if (agent == k) {
        const int soc = solve_assignment_exact(instance, partial);
        best = std::min(best, soc);
        return;
    }
    std::vector<int>& group = groups[agent];
    std::sort(group.begin(), group.end());
    do {
        // Later tasks must not precede earlier ones in the same sequence.
        bool ok = true;
        for (int i = 0; i < (int)group.size() && ok; ++i)
            for (int j = i + 1; j < (int)group.size() && ok; ++j)
                if (reach.reaches(group[j], group[i])) ok = false;
        if (!ok) continue;
        partial.sequences[agent] = group;
        enumerate_orderings(instance, reach, groups, agent + 1, partial, best);
    } while (std::next_permutation(group.begin(), group.end()));
}

}  // namespace

OracleResult brute_force_optimum(const Instance& instance) {
    OracleResult result;
    const int k = instance.num_agents();
    const int m = instance.num_tasks();
    if (k > 2 || m > 4 || instance.map.width() > 8 || instance.map.height() > 8) {
        result.refusal = "oracle guard: requires k <= 2, m <= 4, map <= 8x8";
        return result;
    }

    DagReachability reach(instance.precedence, m);
    int best = kInf;

    std::vector<int> owner(m, 0);
    while (true) {
        std::vector<std::vector<int>> groups(k);
        for (int t = 0; t < m; ++t) groups[owner[t]].push_back(t);
        Assignment partial;
        partial.sequences.assign(k, {});
        enumerate_orderings(instance, reach, groups, 0, partial, best);

        int t = 0;
        for (; t < m; ++t) {
            if (++owner[t] < k) break;
            owner[t] = 0;
        }
        if (t == m) break;
    }

    if (best < kInf) {
        result.solved = true;
        result.optimal_soc = best;
    } else {
        result.refusal = "no feasible solution exists for any assignment";
    }
    return result;
}

}  // namespace tapfpc

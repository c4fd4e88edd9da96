#include <algorithm>

#include "tapfpc/lns.hpp"

namespace tapfpc {

namespace {

// Centroid of the destroyed goals snapped to the nearest passable cell.
int destroyed_centroid(const Instance& instance, const std::vector<int>& destroyed) {
    long long col_sum = 0, row_sum = 0;
    for (int t : destroyed) {
        col_sum += instance.map.col_of(instance.task_goal(t));
        row_sum += instance.map.row_of(instance.task_goal(t));
    }
    const int col = (int)(col_sum / (long long)destroyed.size());
    const int row = (int)(row_sum / (long long)destroyed.size());
    int best = -1, best_d = kInf;
    for (int v = 0; v < instance.map.size(); ++v) {
        if (!instance.map.passable(v)) continue;
        const int d = std::abs(instance.map.col_of(v) - col) + std::abs(instance.map.row_of(v) - row);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

}  // namespace

RepairProposal build_proposal(const Instance& instance, const Neighborhood& nbhd,
                              RepairScope scope, int local_agent_radius, DistanceTable& dist) {
    RepairProposal proposal;
    if (nbhd.failed) {
        proposal.failed = true;
        return proposal;
    }
    const int m = instance.num_tasks();
    const int k = instance.num_agents();

    // Candidate owner set.
    if (scope == RepairScope::Global) {
        for (int a = 0; a < k; ++a) proposal.mutable_agents.push_back(a);
    } else {
        proposal.mutable_agents = nbhd.owner_agents;
        const int centroid = destroyed_centroid(instance, nbhd.destroyed);
        std::vector<std::pair<int, int>> ranked;  // (distance, agent)
        for (int a = 0; a < k; ++a) {
            if (std::find(proposal.mutable_agents.begin(), proposal.mutable_agents.end(), a) !=
                proposal.mutable_agents.end())
                continue;
            const auto& seq = nbhd.exterior.assignment.sequences[a];
            const int anchor = seq.empty() ? instance.agent_start(a)
                                           : instance.task_goal(seq.back());
            ranked.push_back({dist.distance(anchor, centroid), a});
        }
        std::sort(ranked.begin(), ranked.end());
        for (int i = 0; i < (int)ranked.size() && i < local_agent_radius; ++i)
            proposal.mutable_agents.push_back(ranked[i].second);
        std::sort(proposal.mutable_agents.begin(), proposal.mutable_agents.end());
    }

    proposal.sequences = nbhd.exterior.assignment.sequences;
    proposal.approx_completion.assign(m, kInf);
    std::vector<bool> destroyed(m, false);
    for (int t : nbhd.destroyed) destroyed[t] = true;
    for (int t = 0; t < m; ++t)
        if (!destroyed[t]) proposal.approx_completion[t] = nbhd.exterior.timings[t].completion;

    std::vector<int> release = nbhd.release_bound;
    DagReachability reach(instance.precedence, m);
    auto preds = instance.precedence.predecessors_adjacency(m);
    auto succs = instance.precedence.successors_adjacency(m);

    std::vector<int> frozen_owner = nbhd.exterior.assignment.owners(m);

    // Fixed processing order: topological over the destroyed subset, ready
    // tasks by ascending initial release bound, then id.
    PrecedenceDag sub;
    for (auto [u, v] : instance.precedence.edges())
        if (destroyed[u] && destroyed[v]) sub.add_edge(u, v);
    std::vector<int> order_all = topological_order(sub, m, &release);
    std::vector<int> order;
    for (int t : order_all)
        if (destroyed[t]) order.push_back(t);

    // Final parking vertex per agent under the working proposal; appending a
    // task whose goal collides with someone else's parking spot is rejected
    // at the static level.
    std::vector<int> parked(k, -1);
    for (int a = 0; a < k; ++a) {
        const auto& seq = proposal.sequences[a];
        parked[a] = seq.empty() ? nbhd.exterior.paths[a].vertices.back()
                                : instance.task_goal(seq.back());
    }

    auto chain_estimate = [&](int agent, const std::vector<int>& seq, std::vector<int>& est) {
        // Completion estimates along one sequence; false when a frozen
        // deadline or reachability breaks.
        est.assign(seq.size(), 0);
        int prev_vertex = instance.agent_start(agent);
        int prev_est = 0;
        for (int j = 0; j < (int)seq.size(); ++j) {
            const int task = seq[j];
            const int leg = dist.distance(prev_vertex, instance.task_goal(task));
            if (leg >= kInf) return false;
            int rel = destroyed[task] ? release[task] : 0;
            for (int p : preds[task]) {
                if (proposal.approx_completion[p] < kInf)
                    rel = std::max(rel, proposal.approx_completion[p] + 1);
            }
            int e = std::max(j == 0 ? leg : prev_est + std::max(leg, 1), rel);
            // Same-agent successors shift with the sequence; only deadlines
            // from other agents' frozen tasks bind here.
            int deadline = kInf;
            for (int s : succs[task]) {
                if (destroyed[s] || frozen_owner[s] == agent) continue;
                deadline = std::min(deadline, nbhd.exterior.timings[s].completion - 1);
            }
            if (e > deadline) return false;
            est[j] = e;
            prev_vertex = instance.task_goal(task);
            prev_est = e;
        }
        return true;
    };

    std::vector<int> est;
    for (int task : order) {
        const int goal = instance.task_goal(task);
        int best_agent = -1, best_pos = -1, best_score = kInf;
        long long best_finish = kInf;  // tie-break: earliest estimated completion
        std::vector<int> best_est;

        for (int a : proposal.mutable_agents) {
            const auto& seq = proposal.sequences[a];
            for (int pos = 0; pos <= (int)seq.size(); ++pos) {
                // Same-agent order must stay precedence-consistent.
                bool ok = true;
                for (int i = 0; i < pos && ok; ++i)
                    if (reach.reaches(task, seq[i])) ok = false;
                for (int i = pos; i < (int)seq.size() && ok; ++i)
                    if (reach.reaches(seq[i], task)) ok = false;
                if (!ok) continue;

                // Appending as the final task moves the agent's parking spot.
                if (pos == (int)seq.size()) {
                    bool clash = false;
                    for (int b = 0; b < k && !clash; ++b)
                        if (b != a && parked[b] == goal) clash = true;
                    if (clash) continue;
                }

                std::vector<int> trial = seq;
                trial.insert(trial.begin() + pos, task);
                if (!chain_estimate(a, trial, est)) continue;

                const int prev = pos == 0 ? instance.agent_start(a)
                                          : instance.task_goal(seq[pos - 1]);
                int score;
                if (pos == (int)seq.size()) {
                    score = dist.distance(prev, goal);
                } else {
                    const int next = instance.task_goal(seq[pos]);
                    score = dist.distance(prev, goal) + dist.distance(goal, next) -
                            dist.distance(prev, next);
                }
                // Equal detours are common on open maps; prefer the spot
                // whose displaced sequence finishes earliest.
                const long long finish = est.empty() ? 0 : est.back();
                if (score < best_score || (score == best_score && finish < best_finish)) {
                    best_score = score;
                    best_finish = finish;
                    best_agent = a;
                    best_pos = pos;
                    best_est = est;
                }
            }
        }

        if (best_agent < 0) {
            proposal.failed = true;
            return proposal;
        }
        auto& seq = proposal.sequences[best_agent];
        seq.insert(seq.begin() + best_pos, task);
        parked[best_agent] = instance.task_goal(seq.back());
        for (int j = 0; j < (int)seq.size(); ++j) proposal.approx_completion[seq[j]] = best_est[j];
        for (int s : succs[task])
            if (destroyed[s])
                release[s] = std::max(release[s], proposal.approx_completion[task] + 1);
    }
    return proposal;
}

}  // namespace tapfpc

#include <algorithm>
#include <cmath>

#include "tapfpc/lns.hpp"

namespace tapfpc {

const char* destroy_op_name(DestroyOp op) {
    switch (op) {
        case DestroyOp::Random: return "random";
        case DestroyOp::WorstCost: return "worst-cost";
        case DestroyOp::TaskConflict: return "task-conflict";
        case DestroyOp::Shaw: return "shaw";
        case DestroyOp::PrecedenceWait: return "precedence-wait";
        case DestroyOp::LowSlack: return "low-slack";
        case DestroyOp::AgentConflict: return "agent-conflict";
        case DestroyOp::FailureRecovery: return "failure-recovery";
    }
    return "unknown";
}

DestroyOp select_operator(const OperatorPortfolio& portfolio, std::mt19937_64& rng) {
    double total = 0;
    for (double w : portfolio.weights) total += w;
    double draw = std::uniform_real_distribution<double>(0.0, total)(rng);
    for (int i = 0; i < kNumDestroyOps; ++i) {
        draw -= portfolio.weights[i];
        if (draw <= 0) return (DestroyOp)i;
    }
    return (DestroyOp)(kNumDestroyOps - 1);
}

void update_weights(OperatorPortfolio& portfolio, DestroyOp op, RepairOutcome outcome) {
    double reward = 0;
    switch (outcome) {
        case RepairOutcome::NewBest: reward = 4.0; break;
        case RepairOutcome::ImprovedIncumbent: reward = 2.0; break;
        case RepairOutcome::Accepted: reward = 1.0; break;
        case RepairOutcome::Rejected: reward = 0.2; break;
        case RepairOutcome::Failed: reward = 0.1; break;
    }
    double& w = portfolio.weights[(int)op];
    w = std::max(0.01, (1.0 - portfolio.reaction) * w + portfolio.reaction * reward);
}

void DestroyDiagnostics::record_conflict(int iteration, int agent_a, int agent_b, int vertex) {
    if (agent_a >= 0) conflict_agents.emplace_back(iteration, agent_a);
    if (agent_b >= 0) conflict_agents.emplace_back(iteration, agent_b);
    if (vertex >= 0) conflict_vertices.emplace_back(iteration, vertex);
}

void DestroyDiagnostics::trim(int iteration) {
    while (!conflict_agents.empty() && conflict_agents.front().first < iteration - window)
        conflict_agents.pop_front();
    while (!conflict_vertices.empty() && conflict_vertices.front().first < iteration - window)
        conflict_vertices.pop_front();
}

namespace {

std::vector<int> sample_distinct(int population, int count, std::mt19937_64& rng) {
    std::vector<int> pool(population);
    for (int i = 0; i < population; ++i) pool[i] = i;
    count = std::min(count, population);
    for (int i = 0; i < count; ++i) {
        int j = i + (int)(rng() % (std::uint64_t)(population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

// Top `count` task ids ranked by score (descending), ties by ascending id.
std::vector<int> top_by_score(const std::vector<double>& score, int count) {
    std::vector<int> ids(score.size());
    for (int i = 0; i < (int)ids.size(); ++i) ids[i] = i;
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return score[a] > score[b]; });
    ids.resize(std::min<size_t>(count, ids.size()));
    return ids;
}

// Tasks owned by the flagged agents, sampled uniformly; falls back to
// Random when the agent list yields no tasks.
std::vector<int> tasks_of_agents(const Solution& incumbent, const std::vector<int>& agents,
                                 int size, std::mt19937_64& rng) {
    std::vector<int> pool;
    for (int a : agents)
        for (int t : incumbent.assignment.sequences[a]) pool.push_back(t);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.empty()) return {};
    auto picks = sample_distinct((int)pool.size(), size, rng);
    std::vector<int> out;
    for (int i : picks) out.push_back(pool[i]);
    return out;
}

}  // namespace

std::vector<int> seed_tasks(DestroyOp op, const Instance& instance, const Solution& incumbent,
                            const DestroyDiagnostics& diagnostics, int size, DistanceTable& dist,
                            std::mt19937_64& rng) {
    const int m = instance.num_tasks();
    size = std::max(1, std::min(size, m));
    const auto owners = incumbent.assignment.owners(m);

    switch (op) {
        case DestroyOp::Random:
            return sample_distinct(m, size, rng);

        case DestroyOp::WorstCost: {
            // Marginal leg detour of each task within its agent's sequence.
            std::vector<double> score(m, 0);
            for (int a = 0; a < instance.num_agents(); ++a) {
                const auto& seq = incumbent.assignment.sequences[a];
                for (int j = 0; j < (int)seq.size(); ++j) {
                    const int prev = j == 0 ? instance.agent_start(a)
                                            : instance.task_goal(seq[j - 1]);
                    const int goal = instance.task_goal(seq[j]);
                    if (j + 1 < (int)seq.size()) {
                        const int next = instance.task_goal(seq[j + 1]);
                        score[seq[j]] = dist.distance(prev, goal) + dist.distance(goal, next) -
                                        dist.distance(prev, next);
                    } else {
                        score[seq[j]] = dist.distance(prev, goal);
                    }
                }
            }
            return top_by_score(score, size);
        }

        case DestroyOp::TaskConflict: {
            if (diagnostics.conflict_vertices.empty()) return sample_distinct(m, size, rng);
            std::vector<int> hot;
            for (const auto& [it, v] : diagnostics.conflict_vertices) hot.push_back(v);
            std::sort(hot.begin(), hot.end());
            std::vector<double> score(m, 0);
            for (int t = 0; t < m; ++t) {
                const int a = owners[t];
                if (a < 0) continue;
                const auto& seq = incumbent.assignment.sequences[a];
                const auto pos = std::find(seq.begin(), seq.end(), t);
                const int leg_start =
                    pos == seq.begin() ? 0 : incumbent.timings[*(pos - 1)].completion + 1;
                const int leg_end = incumbent.timings[t].completion;
                for (int step = leg_start; step <= leg_end; ++step) {
                    const int v = incumbent.paths[a].at(step);
                    auto range = std::equal_range(hot.begin(), hot.end(), v);
                    score[t] += (double)(range.second - range.first);
                }
            }
            return top_by_score(score, size);
        }

        case DestroyOp::Shaw: {
            const int anchor = (int)(rng() % (std::uint64_t)m);
            std::vector<double> related(m, 0);
            for (int t = 0; t < m; ++t) {
                if (t == anchor) {
                    related[t] = -1;  // most related to itself
                    continue;
                }
                related[t] = dist.distance(instance.task_goal(anchor), instance.task_goal(t)) +
                             std::abs(incumbent.timings[anchor].completion -
                                      incumbent.timings[t].completion);
            }
            std::vector<int> ids(m);
            for (int i = 0; i < m; ++i) ids[i] = i;
            std::stable_sort(ids.begin(), ids.end(),
                             [&](int a, int b) { return related[a] < related[b]; });
            ids.resize(std::min(size, m));
            return ids;
        }

        case DestroyOp::PrecedenceWait: {
            std::vector<double> wait(m, 0);
            for (int t = 0; t < m; ++t)
                wait[t] = incumbent.timings[t].completion - incumbent.timings[t].arrival;
            auto seeds = top_by_score(wait, size);
            // Expand to immediate DAG neighbors on both sides; the wait's
            // cause may be upstream, and closure re-adds successors anyway.
            std::vector<bool> in(m, false);
            for (int t : seeds) in[t] = true;
            for (auto [u, v] : instance.precedence.edges()) {
                if (in[u] && !in[v]) seeds.push_back(v);
                else if (in[v] && !in[u]) seeds.push_back(u);
            }
            std::sort(seeds.begin(), seeds.end());
            seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
            return seeds;
        }

        case DestroyOp::LowSlack: {
            const auto& edges = instance.precedence.edges();
            if (edges.empty()) return sample_distinct(m, size, rng);
            std::vector<int> order((int)edges.size());
            for (int i = 0; i < (int)order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
                return edge_slack(incumbent, edges[x].first, edges[x].second) <
                       edge_slack(incumbent, edges[y].first, edges[y].second);
            });
            std::vector<int> out;
            std::vector<bool> in(m, false);
            for (int i : order) {
                for (int t : {edges[i].first, edges[i].second}) {
                    if (!in[t]) {
                        in[t] = true;
                        out.push_back(t);
                    }
                }
                if ((int)out.size() >= size) break;
            }
            return out;
        }

        case DestroyOp::AgentConflict: {
            std::vector<int> agents;
            for (const auto& [it, a] : diagnostics.conflict_agents) agents.push_back(a);
            std::sort(agents.begin(), agents.end());
            agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
            auto out = tasks_of_agents(incumbent, agents, size, rng);
            return out.empty() ? sample_distinct(m, size, rng) : out;
        }

        case DestroyOp::FailureRecovery: {
            auto out = tasks_of_agents(incumbent, diagnostics.last_failure_agents, size, rng);
            return out.empty() ? sample_distinct(m, size, rng) : out;
        }
    }
    return sample_distinct(m, size, rng);
}

}  // namespace tapfpc

#include <algorithm>
#include <chrono>
#include <memory>

#include "tapfpc/planner.hpp"

namespace tapfpc {

bool PriorityOrder::add(int high, int low) {
    if (high == low || higher(low, high)) return false;
    pairs_.insert({high, low});
    return true;
}

bool PriorityOrder::higher(int a, int b) const {
    // DFS over the (high, low) pairs from a.
    std::vector<int> stack{a};
    std::set<int> seen{a};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (const auto& [h, l] : pairs_) {
            if (h != cur || seen.count(l)) continue;
            if (l == b) return true;
            seen.insert(l);
            stack.push_back(l);
        }
    }
    return false;
}

std::vector<int> PriorityOrder::planning_order(const std::vector<int>& agents) const {
    std::vector<int> order = agents;
    std::sort(order.begin(), order.end());
    std::vector<int> result;
    std::set<int> remaining(order.begin(), order.end());
    while (!remaining.empty()) {
        bool took = false;
        for (int a : order) {
            if (!remaining.count(a)) continue;
            bool ready = true;
            for (const auto& [h, l] : pairs_) {
                if (l == a && remaining.count(h)) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                result.push_back(a);
                remaining.erase(a);
                took = true;
                break;
            }
        }
        if (!took) {  // unreachable while add() rejects cycles
            result.insert(result.end(), remaining.begin(), remaining.end());
            break;
        }
    }
    return result;
}

namespace {

struct AgentPlan {
    int agent = -1;
    std::vector<int> sequence;
    TimedPlanResult plan;
    StageBounds bounds;  // the bounds the current plan was computed with
    bool planned = false;
};

struct PbsNode {
    PriorityOrder priorities;
    std::vector<AgentPlan> plans;
    int soc = 0;
    int soft = 0;
};

struct Conflict {
    int timestep = -1;
    int a = -1, b = -1;  // positions into plans
    bool found() const { return timestep >= 0; }
};

Conflict first_conflict(const PbsNode& node) {
    Conflict best;
    const int n = (int)node.plans.size();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const TimedPath& pa = node.plans[i].plan.path;
            const TimedPath& pb = node.plans[j].plan.path;
            const int T = std::max(pa.length(), pb.length());
            for (int t = 0; t < T; ++t) {
                bool hit = pa.at(t) == pb.at(t);
                if (!hit && t > 0 && pa.at(t - 1) == pb.at(t) && pa.at(t) == pb.at(t - 1))
                    hit = true;
                if (hit) {
                    if (!best.found() || t < best.timestep) best = {t, i, j};
                    break;
                }
            }
        }
    }
    return best;
}

class PbsSolver {
public:
    PbsSolver(const Instance& instance, const Assignment& assignment,
              const std::vector<int>& mutable_agents, const ExteriorContext* exterior,
              const PbsOptions& options, DistanceTable& dist)
        : instance_(instance),
          assignment_(assignment),
          mutable_agents_(mutable_agents),
          exterior_(exterior),
          options_(options),
          dist_(dist) {
        if (exterior_) {
            for (const auto& path : exterior_->paths)
                base_res_.add_path(path, options_.mode == ConflictMode::Relaxed);
        }
        replan_cap_ = options_.max_replans_per_node > 0
                          ? options_.max_replans_per_node
                          : 4 * (int)mutable_agents.size() + 8;
        deadline_enabled_ = options_.time_limit_secs > 0;
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(std::max(options_.time_limit_secs, 0.0)));
    }

    PbsResult solve() {
        PbsResult result;
        auto root = std::make_unique<PbsNode>();
        for (int a : mutable_agents_)
            root->plans.push_back({a, assignment_.sequences[a], {}, {}, false});

        std::vector<int> all((int)root->plans.size());
        for (int i = 0; i < (int)all.size(); ++i) all[i] = i;
        if (!evaluate(*root, all)) return result;
        ++result.high_level_nodes;

        std::vector<std::unique_ptr<PbsNode>> stack;
        stack.push_back(std::move(root));

        bool have_best = false;
        PbsNode best;
        while (!stack.empty()) {
            if (result.high_level_nodes > options_.max_high_level_nodes) break;
            if (deadline_enabled_ && std::chrono::steady_clock::now() > deadline_) break;
            auto node = std::move(stack.back());
            stack.pop_back();

            Conflict c = first_conflict(*node);
            if (!c.found()) {
                if (options_.mode == ConflictMode::Hard || node->soft == 0)
                    return assemble(*node, result, true);
                if (!have_best || node->soft < best.soft ||
                    (node->soft == best.soft && node->soc < best.soc)) {
                    best = *node;
                    have_best = true;
                }
                continue;
            }

            // Branch on the two orderings of the conflicting pair; the
            // lower-priority agent replans. Explore the cheaper child first.
            std::vector<std::unique_ptr<PbsNode>> children;
            for (int which = 0; which < 2; ++which) {
                const int high = which == 0 ? c.a : c.b;
                const int low = which == 0 ? c.b : c.a;
                if (result.high_level_nodes > options_.max_high_level_nodes) break;
                auto child = std::make_unique<PbsNode>(*node);
                if (!child->priorities.add(node->plans[high].agent, node->plans[low].agent))
                    continue;
                std::vector<int> dirty{low};
                ++result.high_level_nodes;
                if (evaluate(*child, dirty)) children.push_back(std::move(child));
            }
            std::sort(children.begin(), children.end(), [this](const auto& x, const auto& y) {
                if (options_.mode == ConflictMode::Relaxed && x->soft != y->soft)
                    return x->soft > y->soft;
                return x->soc > y->soc;  // worse first: better child is popped first
            });
            for (auto& child : children) stack.push_back(std::move(child));
        }
        if (have_best) return assemble(best, result, true);
        return result;
    }

private:
    // Plans every queued agent, cascading to lower-priority agents that now
    // collide and to agents whose stage bounds were invalidated by newly
    // realized completion times. Returns false when a plan is infeasible or
    // the cascade fails to settle within the cap.
    bool evaluate(PbsNode& node, std::vector<int> queue) {
        int replans = 0;
        std::vector<int> agent_ids;
        for (const auto& p : node.plans) agent_ids.push_back(p.agent);

        while (!queue.empty()) {
            if (++replans > replan_cap_) return false;
            if (deadline_enabled_ && std::chrono::steady_clock::now() > deadline_) return false;

            auto order = node.priorities.planning_order(agent_ids);
            std::sort(queue.begin(), queue.end(), [&](int x, int y) {
                auto rx = std::find(order.begin(), order.end(), node.plans[x].agent);
                auto ry = std::find(order.begin(), order.end(), node.plans[y].agent);
                return rx < ry;
            });
            const int idx = queue.front();
            queue.erase(queue.begin());
            AgentPlan& ap = node.plans[idx];

            TimingContext timing = timing_context(node);
            StageBounds bounds =
                derive_stage_bounds(ap.sequence, instance_, timing, dist_,
                                    instance_.agent_start(ap.agent));
            if (!bounds.feasible()) return false;

            ReservationTable res = base_res_;
            for (const auto& other : node.plans) {
                if (other.agent == ap.agent || !other.planned) continue;
                if (node.priorities.higher(other.agent, ap.agent))
                    res.add_path(other.plan.path, false);
            }

            TimedPlanResult plan;
            if (ap.sequence.empty()) {
                plan = plan_evasion(instance_.map, instance_.agent_start(ap.agent), res);
            } else {
                std::vector<int> goals;
                for (int t : ap.sequence) goals.push_back(instance_.task_goal(t));
                plan = options_.low_level == LowLevel::Sipps
                           ? plan_sipps(instance_.map, instance_.agent_start(ap.agent), goals,
                                        bounds, res, dist_)
                           : plan_mla_star(instance_.map, instance_.agent_start(ap.agent), goals,
                                           bounds, res, dist_);
            }
            if (!plan.found) return false;
            ap.plan = std::move(plan);
            ap.bounds = std::move(bounds);
            ap.planned = true;

            // Cascade: lower-priority agents that now collide with this
            // path, and planned agents whose realized completions violate
            // the bounds recomputed from the new timing. Plans that still
            // satisfy the fresh bounds stay; replanning on every bound
            // wobble ping-pongs and never settles.
            TimingContext updated = timing_context(node);
            for (int other = 0; other < (int)node.plans.size(); ++other) {
                if (other == idx || !node.plans[other].planned) continue;
                if (std::find(queue.begin(), queue.end(), other) != queue.end()) continue;
                const AgentPlan& op = node.plans[other];
                bool dirty = false;
                if (node.priorities.higher(ap.agent, op.agent) &&
                    paths_collide(ap.plan.path, op.plan.path))
                    dirty = true;
                if (!dirty) {
                    StageBounds fresh =
                        derive_stage_bounds(op.sequence, instance_, updated, dist_,
                                            instance_.agent_start(op.agent));
                    for (int j = 0; j < (int)op.sequence.size() && !dirty; ++j) {
                        const int done = op.plan.stage_completions[j];
                        if (done < fresh.lower[j] || done > fresh.upper[j]) dirty = true;
                    }
                }
                if (dirty) queue.push_back(other);
            }
        }

        node.soc = 0;
        node.soft = 0;
        for (const auto& p : node.plans) {
            if (!p.sequence.empty()) node.soc += p.plan.completion_time();
            node.soft += p.plan.soft_conflicts;
        }
        return true;
    }

    static bool paths_collide(const TimedPath& a, const TimedPath& b) {
        const int T = std::max(a.length(), b.length());
        for (int t = 0; t < T; ++t) {
            if (a.at(t) == b.at(t)) return true;
            if (t > 0 && a.at(t - 1) == b.at(t) && a.at(t) == b.at(t - 1)) return true;
        }
        return false;
    }

    TimingContext timing_context(const PbsNode& node) const {
        TimingContext ctx;
        ctx.completion.assign(instance_.num_tasks(), kInf);
        ctx.frozen.assign(instance_.num_tasks(), false);
        if (exterior_) {
            for (int t = 0; t < instance_.num_tasks(); ++t) {
                if (exterior_->frozen_completions[t] >= 0) {
                    ctx.completion[t] = exterior_->frozen_completions[t];
                    ctx.frozen[t] = true;
                }
            }
        }
        for (const auto& p : node.plans) {
            if (!p.planned) continue;
            for (int j = 0; j < (int)p.sequence.size(); ++j)
                ctx.completion[p.sequence[j]] = p.plan.stage_completions[j];
        }
        return ctx;
    }

    PbsResult assemble(const PbsNode& node, PbsResult partial, bool found) const {
        PbsResult result = std::move(partial);
        result.found = found;
        result.soc = node.soc;
        result.soft_conflicts = node.soft;
        for (const auto& p : node.plans) {
            result.agents.push_back(p.agent);
            TimedPath path = p.plan.path;
            path.owner = p.agent;
            result.paths.push_back(std::move(path));
            result.stage_completions.push_back(p.plan.stage_completions);
        }
        return result;
    }

    const Instance& instance_;
    const Assignment& assignment_;
    const std::vector<int>& mutable_agents_;
    const ExteriorContext* exterior_;
    const PbsOptions& options_;
    DistanceTable& dist_;
    ReservationTable base_res_;
    int replan_cap_ = 0;
    bool deadline_enabled_ = false;
    std::chrono::steady_clock::time_point deadline_;
};

}  // namespace

PbsResult solve_pbs_pc(const Instance& instance, const Assignment& assignment,
                       const std::vector<int>& mutable_agents, const ExteriorContext* exterior,
                       const PbsOptions& options, DistanceTable& dist) {
    PbsSolver solver(instance, assignment, mutable_agents, exterior, options, dist);
    return solver.solve();
}

}  // namespace tapfpc

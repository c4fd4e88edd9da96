#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "tapfpc/planner.hpp"

namespace tapfpc {

int plan_horizon(const GridMap& map, const ReservationTable& res, const StageBounds& bounds,
                 int num_stages, int start_time) {
    int base = std::max(res.max_time(), start_time);
    for (int b : bounds.lower)
        if (b < kInf) base = std::max(base, b);
    for (int b : bounds.upper)
        if (b < kInf) base = std::max(base, b);
    return base + (num_stages + 1) * (map.size() + 1);
}

namespace {

struct MlaNode {
    int vertex;
    int stage;     // stages completed so far
    int time;
    int waits;
    int csum;      // sum of completed stage times: the secondary objective
    int parent;    // index into arena, -1 at root
    bool advanced; // stage (stage-1) completed at `time` on this node
};

struct OpenEntry {
    std::int64_t f;  // final-completion estimate scaled, plus completion-sum estimate
    int time;
    int waits;
    int vertex;
    int node;  // arena index; also insertion order
    bool operator>(const OpenEntry& o) const {
        if (f != o.f) return f > o.f;
        if (time != o.time) return time < o.time;  // prefer deeper states
        if (waits != o.waits) return waits > o.waits;
        if (vertex != o.vertex) return vertex > o.vertex;
        return node > o.node;
    }
};

// Optimistic completion chain from (vertex, stage, time). Returns the final
// completion estimate and the remaining-stage completion sum; kInf when a
// downstream window is unreachable. Plans minimize (final completion, sum
// of stage completions) so repeated replans with equal bounds are stable.
std::pair<int, std::int64_t> optimistic_completion(int vertex, int stage, int time,
                                                   const std::vector<int>& goals,
                                                   const StageBounds& bounds,
                                                   const std::vector<int>& step,
                                                   DistanceTable& dist) {
    const int stages = (int)goals.size();
    if (stage >= stages) return {time, 0};
    int leg = dist.distance(vertex, goals[stage]);
    if (leg >= kInf) return {kInf, 0};
    int est = std::max(time + leg, bounds.lower[stage]);
    if (est > bounds.upper[stage]) return {kInf, 0};
    std::int64_t sum = est;
    for (int i = stage + 1; i < stages; ++i) {
        est = std::max(est + step[i], bounds.lower[i]);
        if (est > bounds.upper[i]) return {kInf, 0};
        sum += est;
    }
    return {est, sum};
}

}  // namespace

TimedPlanResult plan_mla_star(const GridMap& map, int start, const std::vector<int>& goals,
                              const StageBounds& bounds, const ReservationTable& res,
                              DistanceTable& dist, int start_time) {
    TimedPlanResult result;
    const int stages = (int)goals.size();
    if (stages == 0 || !bounds.feasible()) return result;
    for (int b : bounds.lower)
        if (b >= kInf) return result;

    const int horizon = plan_horizon(map, res, bounds, stages, start_time);

    std::vector<int> step(stages, 0);
    for (int i = 1; i < stages; ++i) {
        int leg = dist.distance(goals[i - 1], goals[i]);
        if (leg >= kInf) return result;
        step[i] = std::max(leg, 1);
    }

    std::vector<MlaNode> arena;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>> open;
    // Best completion-sum seen per (vertex, stage, time); routes that reach
    // the same state having completed stages later are dominated.
    std::unordered_map<std::uint64_t, int> seen;
    const std::int64_t scale = (std::int64_t)stages * (horizon + 1) + 1;
    auto key = [&](int v, int j, int t) {
        return ((std::uint64_t)t * (stages + 1) + j) * (std::uint64_t)map.size() + v;
    };

    // One stage may complete per arrival; completion waits for the stage
    // window and, on the final stage, for a vertex safe to park on forever.
    auto settle = [&](int v, int t, int j) -> std::pair<int, bool> {
        if (j < stages && v == goals[j] && t >= bounds.lower[j] && t <= bounds.upper[j]) {
            if (j + 1 == stages && !res.park_safe(v, t)) return {j, false};
            return {j + 1, true};
        }
        return {j, false};
    };

    auto push = [&](int v, int t, int j_before, int waits, int csum, int parent) {
        auto [j, advanced] = settle(v, t, j_before);
        if (advanced) csum += t;
        auto [it, fresh] = seen.emplace(key(v, j, t), csum);
        if (!fresh) {
            if (it->second <= csum) return;
            it->second = csum;
        }
        auto [est, rem] = optimistic_completion(v, j, t, goals, bounds, step, dist);
        if (est >= kInf || est > horizon) return;
        arena.push_back({v, j, t, waits, csum, parent, advanced});
        open.push({(std::int64_t)est * scale + csum + rem, t, waits, v, (int)arena.size() - 1});
    };

    push(start, start_time, 0, 0, 0, -1);

    std::vector<int> nbrs;
    while (!open.empty()) {
        const int ni = open.top().node;
        open.pop();
        const MlaNode node = arena[ni];
        if (seen[key(node.vertex, node.stage, node.time)] < node.csum) continue;  // superseded
        ++result.expanded;

        if (node.stage == stages) {
            // Reconstruct path and stage completion times.
            std::vector<int> rev;
            std::vector<int> completions(stages, -1);
            for (int i = ni; i >= 0; i = arena[i].parent) {
                rev.push_back(arena[i].vertex);
                if (arena[i].advanced) completions[arena[i].stage - 1] = arena[i].time;
            }
            std::reverse(rev.begin(), rev.end());
            result.found = true;
            result.path.vertices = std::move(rev);
            result.stage_completions = std::move(completions);
            return result;
        }

        const int t = node.time + 1;
        if (t > horizon) continue;
        map.neighbors(node.vertex, nbrs);
        for (int u : nbrs) {
            if (res.hard_vertex_blocked(u, t)) continue;
            if (res.hard_edge_blocked(node.vertex, u, t)) continue;
            push(u, t, node.stage, node.waits, node.csum, ni);
        }
        if (!res.hard_vertex_blocked(node.vertex, t))
            push(node.vertex, t, node.stage, node.waits + 1, node.csum, ni);
    }
    return result;
}

TimedPlanResult plan_evasion(const GridMap& map, int start, const ReservationTable& res,
                             int start_time) {
    TimedPlanResult result;
    const int horizon = std::max(res.max_time(), start_time) + map.size() + 2;

    struct Node {
        int vertex, time, parent;
    };
    std::vector<Node> arena;
    std::deque<int> queue;
    std::unordered_set<std::uint64_t> seen;
    auto key = [&](int v, int t) { return (std::uint64_t)t * map.size() + v; };

    arena.push_back({start, start_time, -1});
    seen.insert(key(start, start_time));
    queue.push_back(0);

    std::vector<int> nbrs;
    while (!queue.empty()) {
        const int ni = queue.front();
        queue.pop_front();
        const Node node = arena[ni];
        ++result.expanded;

        if (res.park_safe(node.vertex, node.time)) {
            std::vector<int> rev;
            for (int i = ni; i >= 0; i = arena[i].parent) rev.push_back(arena[i].vertex);
            std::reverse(rev.begin(), rev.end());
            result.found = true;
            result.path.vertices = std::move(rev);
            return result;
        }

        const int t = node.time + 1;
        if (t > horizon) continue;
        map.neighbors(node.vertex, nbrs);
        nbrs.push_back(node.vertex);
        for (int u : nbrs) {
            if (res.hard_vertex_blocked(u, t)) continue;
            if (u != node.vertex && res.hard_edge_blocked(node.vertex, u, t)) continue;
            if (!seen.insert(key(u, t)).second) continue;
            arena.push_back({u, t, ni});
            queue.push_back((int)arena.size() - 1);
        }
    }
    return result;
}

}  // namespace tapfpc

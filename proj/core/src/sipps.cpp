#include <algorithm>
#include <cstdint>
#include <queue>
#include <unordered_map>

#include "tapfpc/planner.hpp"

namespace tapfpc {

namespace {

// Maximal runs of hard-free timesteps, split further wherever the soft
// occupancy status changes, so each interval is uniformly soft or clean.
struct Interval {
    int lo, hi;  // inclusive; hi == kInf for the open-ended tail
    bool soft;
};

class IntervalIndex {
public:
    IntervalIndex(const GridMap& map, const ReservationTable& res) : map_(&map), res_(&res) {
        cache_.resize(map.size());
        built_.assign(map.size(), false);
    }

    const std::vector<Interval>& at(int v) {
        if (!built_[v]) {
            build(v);
            built_[v] = true;
        }
        return cache_[v];
    }

    // Index of the interval containing t, or -1.
    int find(int v, int t) {
        const auto& ivs = at(v);
        for (int i = 0; i < (int)ivs.size(); ++i)
            if (ivs[i].lo <= t && t <= ivs[i].hi) return i;
        return -1;
    }

private:
    void build(int v) {
        const auto& hard = res_->hard_times(v);
        const auto& soft = res_->soft_times(v);
        const int park = res_->park_time(v);
        auto& out = cache_[v];

        auto emit = [&](int lo, int hi) {  // split [lo, hi] at soft boundaries
            if (lo > hi) return;
            auto s = std::lower_bound(soft.begin(), soft.end(), lo);
            int cur = lo;
            while (s != soft.end() && (hi == kInf || *s <= hi)) {
                int run_lo = *s;
                int run_hi = run_lo;
                auto next = std::next(s);
                while (next != soft.end() && (hi == kInf || *next <= hi) && *next == run_hi + 1) {
                    run_hi = *next;
                    s = next;
                    next = std::next(s);
                }
                if (cur < run_lo) out.push_back({cur, run_lo - 1, false});
                out.push_back({run_lo, run_hi, true});
                cur = run_hi + 1;
                s = next;
            }
            if (cur <= hi) out.push_back({cur, hi, false});
        };

        int cur = 0;
        for (int h : hard) {
            if (h >= park) break;
            if (cur <= h - 1) emit(cur, h - 1);
            cur = std::max(cur, h + 1);
        }
        if (park == kInf)
            emit(cur, kInf);
        else if (cur <= park - 1)
            emit(cur, park - 1);
    }

    const GridMap* map_;
    const ReservationTable* res_;
    std::vector<std::vector<Interval>> cache_;
    std::vector<bool> built_;
};

struct SippsNode {
    int vertex;
    int stage;       // stages completed after the completion chain
    int interval;    // index into the vertex's interval list
    int arrive;      // physical arrival timestep at the vertex
    int time;        // settled timestep (>= arrive when completions waited)
    int csoft;
    int waits;
    int csum;        // sum of completed stage times: the tertiary objective
    int parent;
    bool dead = false;
    std::vector<int> completion_times;  // stages completed on this node, in order
};

struct OpenEntry {
    int csoft;
    std::int64_t f;
    int waits;
    int vertex;
    int node;
    bool operator>(const OpenEntry& o) const {
        if (csoft != o.csoft) return csoft > o.csoft;
        if (f != o.f) return f > o.f;
        if (waits != o.waits) return waits > o.waits;
        if (vertex != o.vertex) return vertex > o.vertex;
        return node > o.node;
    }
};

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

TimedPlanResult plan_sipps(const GridMap& map, int start, const std::vector<int>& goals,
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

    IntervalIndex intervals(map, res);
    std::vector<SippsNode> arena;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>> open;

    const std::int64_t scale = (std::int64_t)stages * (horizon + 1) + 1;

    // Pareto frontier per (vertex, stage, interval): nondominated
    // (time, csoft, completion sum). Within a soft interval, waiting costs
    // one collision per step, so the comparison uses csoft adjusted by the
    // interval's per-step wait cost.
    struct FrontEntry {
        int time, eff, csum, node;
    };
    std::unordered_map<std::uint64_t, std::vector<FrontEntry>> frontier;
    auto front_key = [&](int v, int j, int iv) {
        return ((std::uint64_t)iv * (stages + 1) + j) * (std::uint64_t)map.size() + v;
    };

    // Completion chain applied at node creation: complete as many
    // consecutive stages as this vertex and interval allow. Completions are
    // strictly increasing; the final stage additionally requires an
    // open-ended interval so the agent can park.
    auto settle_chain = [&](int v, const Interval& iv, int arrive, int stage_in, int csoft_in,
                            int waits_in, int csum_in, std::vector<int>& completion_times) {
        int j = stage_in, t = arrive, c = csoft_in, w = waits_in, cs = csum_in;
        bool first = true;
        completion_times.clear();
        while (j < stages && goals[j] == v) {
            int tc = std::max(first ? t : t + 1, bounds.lower[j]);
            if (tc > bounds.upper[j] || tc > horizon) break;
            if (j + 1 == stages) {
                if (iv.hi != kInf) break;
                c += iv.soft ? tc - t : 0;
                c += res.soft_park_hits(v, tc + 1);
                w += tc - t;
                cs += tc;
                completion_times.push_back(tc);
                t = tc;
                ++j;
                break;
            }
            if (tc > iv.hi) break;
            c += iv.soft ? tc - t : 0;
            w += tc - t;
            cs += tc;
            completion_times.push_back(tc);
            t = tc;
            ++j;
            first = false;
        }
        return std::tuple<int, int, int, int, int>{j, t, c, w, cs};
    };

    auto make_node = [&](int v, int interval_idx, int arrive, int stage_in, int csoft_in,
                         int waits_in, int csum_in, int parent) {
        const Interval& iv = intervals.at(v)[interval_idx];
        std::vector<int> completion_times;
        auto [j, t, c, w, cs] = settle_chain(v, iv, arrive, stage_in, csoft_in, waits_in,
                                             csum_in, completion_times);
        auto [est, rem] = optimistic_completion(v, j, t, goals, bounds, step, dist);
        if (est >= kInf || est > horizon) return;

        auto& front = frontier[front_key(v, j, interval_idx)];
        const int wait_cost = iv.soft ? 1 : 0;
        const int eff = c - wait_cost * t;
        for (const auto& e : front)
            if (e.time <= t && e.eff <= eff && e.csum <= cs) return;  // dominated
        for (auto& e : front)
            if (t <= e.time && eff <= e.eff && cs <= e.csum && e.node >= 0)
                arena[e.node].dead = true;
        std::erase_if(front, [&](const FrontEntry& e) {
            return t <= e.time && eff <= e.eff && cs <= e.csum;
        });

        SippsNode node{v, j, interval_idx, arrive, t, c, w, cs, parent, false,
                       std::move(completion_times)};
        arena.push_back(std::move(node));
        front.push_back({t, eff, cs, (int)arena.size() - 1});
        open.push({c, (std::int64_t)est * scale + cs + rem, w, v, (int)arena.size() - 1});
    };

    const int root_iv = intervals.find(start, start_time);
    if (root_iv < 0) return result;
    make_node(start, root_iv, start_time, 0, res.soft_vertex_hit(start, start_time) ? 1 : 0, 0, 0,
              -1);

    std::vector<int> nbrs;
    while (!open.empty()) {
        const int ni = open.top().node;
        open.pop();
        if (arena[ni].dead) continue;
        arena[ni].dead = true;  // expand once
        const SippsNode node = arena[ni];
        ++result.expanded;

        if (node.stage == stages) {
            // Walk back collecting arrivals, then replay forward to fill the
            // position-per-timestep path and the stage completion times.
            std::vector<int> chain;
            for (int i = ni; i >= 0; i = arena[i].parent) chain.push_back(i);
            std::reverse(chain.begin(), chain.end());
            result.found = true;
            result.stage_completions.reserve(stages);
            auto& verts = result.path.vertices;
            for (int idx : chain) {
                const SippsNode& n = arena[idx];
                if (!verts.empty()) {
                    while ((int)verts.size() < n.arrive - start_time)
                        verts.push_back(verts.back());
                }
                while ((int)verts.size() <= n.time - start_time) verts.push_back(n.vertex);
                for (int tc : n.completion_times) result.stage_completions.push_back(tc);
            }
            result.soft_conflicts = node.csoft;
            return result;
        }

        const Interval& iv = intervals.at(node.vertex)[node.interval];
        const int depart_max = iv.hi == kInf ? horizon : std::min(iv.hi, horizon);

        // Moves into every reachable interval of every neighbor.
        map.neighbors(node.vertex, nbrs);
        for (int u : nbrs) {
            const auto& target = intervals.at(u);
            for (int tj = 0; tj < (int)target.size(); ++tj) {
                const Interval& J = target[tj];
                int arr_lo = std::max(node.time + 1, J.lo);
                int arr_hi = std::min(J.hi, depart_max + 1);
                arr_hi = std::min(arr_hi, horizon);
                if (arr_lo > arr_hi) continue;

                int t1 = -1, t2 = -1;
                for (int arr = arr_lo; arr <= arr_hi; ++arr) {
                    if (res.hard_edge_blocked(node.vertex, u, arr)) continue;
                    if (t1 < 0) t1 = arr;
                    if (!res.soft_edge_hit(node.vertex, u, arr)) {
                        if (arr > t1) t2 = arr;
                        break;
                    }
                    if (t1 >= 0 && !res.soft_edge_hit(node.vertex, u, t1)) break;
                }
                if (t1 < 0) continue;
                int wait1 = t1 - 1 - node.time;
                int dc1 = wait1 * (iv.soft ? 1 : 0) +
                          (res.soft_edge_hit(node.vertex, u, t1) ? 1 : 0) + (J.soft ? 1 : 0);
                make_node(u, tj, t1, node.stage, node.csoft + dc1, node.waits + wait1, node.csum,
                          ni);
                if (t2 > t1) {
                    // Same interval entered later but without the soft edge hit.
                    int wait2 = t2 - 1 - node.time;
                    int dc2 = wait2 * (iv.soft ? 1 : 0) + (J.soft ? 1 : 0);
                    make_node(u, tj, t2, node.stage, node.csoft + dc2, node.waits + wait2,
                              node.csum, ni);
                }
            }
        }

        // Waiting through to the next interval of the same vertex (only
        // possible when they are contiguous, i.e. split by a soft boundary).
        const auto& own = intervals.at(node.vertex);
        if (iv.hi != kInf && node.interval + 1 < (int)own.size() &&
            own[node.interval + 1].lo == iv.hi + 1 && iv.hi + 1 <= horizon) {
            const Interval& J = own[node.interval + 1];
            int wait = iv.hi - node.time;
            int dc = wait * (iv.soft ? 1 : 0) + (J.soft ? 1 : 0);
            make_node(node.vertex, node.interval + 1, iv.hi + 1, node.stage, node.csoft + dc,
                      node.waits + wait + 1, node.csum, ni);
        }
    }
    return result;
}

}  // namespace tapfpc

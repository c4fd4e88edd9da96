#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tapfpc/grid_map.hpp"
#include "tapfpc/solution.hpp"

namespace tapfpc {

// Space-time occupancy reservations against which single-agent planners
// search. Hard entries must be avoided; soft entries are penalized.
// A reserved path parks at its final vertex: that vertex stays reserved
// for every later timestep (hard in both repair modes).
class ReservationTable {
public:
    ReservationTable() = default;

    // Adds a full path. When soft_in_transit is set, the moving portion of
    // the path is recorded as soft while the parked tail stays hard.
    void add_path(const TimedPath& path, bool soft_in_transit = false);

    void add_hard_vertex(int v, int t);
    void add_hard_edge(int from, int to, int arrive_t);
    void add_soft_vertex(int v, int t);
    void add_soft_edge(int from, int to, int arrive_t);
    void add_park(int v, int t);  // vertex blocked for all timesteps >= t

    bool hard_vertex_blocked(int v, int t) const;
    bool hard_edge_blocked(int from, int to, int arrive_t) const;
    bool soft_vertex_hit(int v, int t) const;
    bool soft_edge_hit(int from, int to, int arrive_t) const;

    // Earliest timestep from which v is permanently blocked (kInf if none).
    int park_time(int v) const;
    // True when parking at v from timestep t onward avoids every hard entry.
    bool park_safe(int v, int t) const;
    // Soft hits incurred by parking at v from timestep t onward.
    int soft_park_hits(int v, int t) const;

    // Sorted finite hard / soft occupancy times for one vertex.
    const std::vector<int>& hard_times(int v) const;
    const std::vector<int>& soft_times(int v) const;

    // Latest finite reserved timestep across all entries (0 when empty).
    int max_time() const { return max_time_; }
    bool has_soft() const { return !soft_vertex_.empty() || !soft_edge_.empty(); }

private:
    // Collision-free for vertices < 2^21 and timesteps < 2^22.
    static std::uint64_t edge_key(int from, int to, int t) {
        return ((std::uint64_t)t << 42) | ((std::uint64_t)from << 21) | (std::uint64_t)to;
    }

    std::unordered_map<int, std::vector<int>> hard_vertex_;  // sorted, deduped lazily
    std::unordered_map<int, std::vector<int>> soft_vertex_;
    std::unordered_map<std::uint64_t, char> hard_edge_;
    std::unordered_map<std::uint64_t, char> soft_edge_;
    std::unordered_map<int, int> park_;
    int max_time_ = 0;

    mutable bool sealed_ = true;
    void seal() const;
};

}  // namespace tapfpc

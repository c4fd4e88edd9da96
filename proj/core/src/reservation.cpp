#include "tapfpc/reservation.hpp"

#include <algorithm>

namespace tapfpc {

void ReservationTable::add_path(const TimedPath& path, bool soft_in_transit) {
    const auto& v = path.vertices;
    if (v.empty()) return;
    const int park_t = (int)v.size() - 1;
    for (int t = 0; t < park_t; ++t) {
        if (soft_in_transit)
            add_soft_vertex(v[t], t);
        else
            add_hard_vertex(v[t], t);
        if (v[t] != v[t + 1]) {
            // Forbid (or penalize) the opposing traversal of the same edge.
            if (soft_in_transit)
                add_soft_edge(v[t + 1], v[t], t + 1);
            else
                add_hard_edge(v[t + 1], v[t], t + 1);
        }
    }
    add_park(v.back(), park_t);
}

void ReservationTable::add_hard_vertex(int v, int t) {
    hard_vertex_[v].push_back(t);
    max_time_ = std::max(max_time_, t);
    sealed_ = false;
}

void ReservationTable::add_soft_vertex(int v, int t) {
    soft_vertex_[v].push_back(t);
    max_time_ = std::max(max_time_, t);
    sealed_ = false;
}

void ReservationTable::add_hard_edge(int from, int to, int arrive_t) {
    hard_edge_[edge_key(from, to, arrive_t)] = 1;
    max_time_ = std::max(max_time_, arrive_t);
}

void ReservationTable::add_soft_edge(int from, int to, int arrive_t) {
    soft_edge_[edge_key(from, to, arrive_t)] = 1;
    max_time_ = std::max(max_time_, arrive_t);
}

void ReservationTable::add_park(int v, int t) {
    auto it = park_.find(v);
    if (it == park_.end())
        park_[v] = t;
    else
        it->second = std::min(it->second, t);
    max_time_ = std::max(max_time_, t);
}

void ReservationTable::seal() const {
    if (sealed_) return;
    auto* self = const_cast<ReservationTable*>(this);
    for (auto& [v, times] : self->hard_vertex_) {
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
    }
    for (auto& [v, times] : self->soft_vertex_) {
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
    }
    self->sealed_ = true;
}

bool ReservationTable::hard_vertex_blocked(int v, int t) const {
    auto pit = park_.find(v);
    if (pit != park_.end() && t >= pit->second) return true;
    auto it = hard_vertex_.find(v);
    if (it == hard_vertex_.end()) return false;
    seal();
    return std::binary_search(it->second.begin(), it->second.end(), t);
}

bool ReservationTable::hard_edge_blocked(int from, int to, int arrive_t) const {
    return hard_edge_.count(edge_key(from, to, arrive_t)) > 0;
}

bool ReservationTable::soft_vertex_hit(int v, int t) const {
    auto it = soft_vertex_.find(v);
    if (it == soft_vertex_.end()) return false;
    seal();
    return std::binary_search(it->second.begin(), it->second.end(), t);
}

bool ReservationTable::soft_edge_hit(int from, int to, int arrive_t) const {
    return soft_edge_.count(edge_key(from, to, arrive_t)) > 0;
}

int ReservationTable::park_time(int v) const {
    auto it = park_.find(v);
    return it == park_.end() ? kInf : it->second;
}

bool ReservationTable::park_safe(int v, int t) const {
    if (park_time(v) != kInf) return false;
    const auto& times = hard_times(v);
    return times.empty() || times.back() < t;
}

int ReservationTable::soft_park_hits(int v, int t) const {
    auto it = soft_vertex_.find(v);
    if (it == soft_vertex_.end()) return 0;
    seal();
    const auto& times = it->second;
    return (int)(times.end() - std::lower_bound(times.begin(), times.end(), t));
}

const std::vector<int>& ReservationTable::hard_times(int v) const {
    static const std::vector<int> kEmpty;
    auto it = hard_vertex_.find(v);
    if (it == hard_vertex_.end()) return kEmpty;
    seal();
    return it->second;
}

const std::vector<int>& ReservationTable::soft_times(int v) const {
    static const std::vector<int> kEmpty;
    auto it = soft_vertex_.find(v);
    if (it == soft_vertex_.end()) return kEmpty;
    seal();
    return it->second;
}

}  // namespace tapfpc

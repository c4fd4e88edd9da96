#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tapfpc/grid_map.hpp"

namespace tapfpc {

struct Task {
    int id = -1;
    int goal = -1;  // flattened vertex index
};

struct AgentSpec {
    int id = -1;
    int start = -1;  // flattened vertex index
};

// Acyclic set of ordered task-id pairs (u, v): v may complete only
// strictly after u. No self-loops, no duplicate edges.
class PrecedenceDag {
public:
    PrecedenceDag() = default;
    explicit PrecedenceDag(std::vector<std::pair<int, int>> edges);

    void add_edge(int u, int v);
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    int edge_count() const { return (int)edges_.size(); }
    bool empty() const { return edges_.empty(); }

    // Adjacency restricted to task ids < m; out-of-range ids throw.
    std::vector<std::vector<int>> successors_adjacency(int num_tasks) const;
    std::vector<std::vector<int>> predecessors_adjacency(int num_tasks) const;

private:
    std::vector<std::pair<int, int>> edges_;
    std::set<std::pair<int, int>> seen_;
};

struct Instance {
    GridMap map;
    std::vector<AgentSpec> agents;
    std::vector<Task> tasks;
    PrecedenceDag precedence;
    std::uint64_t seed = 0;
    std::string map_file;  // file-name reference carried through serialization

    int num_agents() const { return (int)agents.size(); }
    int num_tasks() const { return (int)tasks.size(); }
    int task_goal(int task_id) const { return tasks[task_id].goal; }
    int agent_start(int agent_id) const { return agents[agent_id].start; }
};

struct GeneratorConfig {
    std::string map_name;
    int num_agents = 1;
    int num_tasks = 1;
    int num_precedence = 0;
    int count = 1;  // instances per configuration, used by the suite runner
    std::uint64_t seed = 0;
};

// Randomly populates an instance on the given map: distinct agent starts,
// task goals sampled with replacement, and exactly num_precedence edges
// oriented along a random permutation so the result is acyclic.
// Deterministic for a fixed (cfg, map).
Instance generate_instance(const GeneratorConfig& cfg, const GridMap& map);

// Instance JSON round trip. read_instance resolves the `map_file` reference
// through map_loader and checks the recorded content hash; it rejects
// dangling task ids, self-loops, and cyclic precedence.
std::string write_instance(const Instance& instance);
Instance read_instance(const std::string& text,
                       const std::function<std::string(const std::string&)>& map_loader);

// Loads an instance file from disk, resolving the map relative to the
// instance file's directory.
Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& instance, const std::string& path);

// FNV-1a over the raw bytes, rendered as 16 hex digits.
std::string content_hash(const std::string& bytes);

// Topological order of 0..num_tasks-1 under dag. Ties among ready tasks
// break by ascending release bound (when provided), then by task id.
// Throws std::runtime_error naming a cycle member if dag is cyclic.
std::vector<int> topological_order(const PrecedenceDag& dag, int num_tasks,
                                   const std::vector<int>* release_bounds = nullptr);

// seed plus every DAG descendant of a seed task; successor-closed.
std::vector<int> transitive_successors(const PrecedenceDag& dag, int num_tasks,
                                       const std::vector<int>& seed_tasks);

// Dense reachability over the task DAG, for order-consistency checks
// during insertion. reaches(u, v) is true iff v is u or a descendant of u.
class DagReachability {
public:
    DagReachability(const PrecedenceDag& dag, int num_tasks);
    bool reaches(int u, int v) const { return closure_[u][v]; }

private:
    std::vector<std::vector<bool>> closure_;
};

}  // namespace tapfpc

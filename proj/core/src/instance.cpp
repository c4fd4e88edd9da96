#include "tapfpc/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tapfpc {

using json = nlohmann::ordered_json;

PrecedenceDag::PrecedenceDag(std::vector<std::pair<int, int>> edges) {
    for (auto& [u, v] : edges) add_edge(u, v);
}

void PrecedenceDag::add_edge(int u, int v) {
    if (u == v) throw std::runtime_error("precedence self-loop on task " + std::to_string(u));
    if (u < 0 || v < 0) throw std::runtime_error("negative task id in precedence edge");
    if (!seen_.insert({u, v}).second)
        throw std::runtime_error("duplicate precedence edge (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
    edges_.emplace_back(u, v);
}

std::vector<std::vector<int>> PrecedenceDag::successors_adjacency(int num_tasks) const {
    std::vector<std::vector<int>> adj(num_tasks);
    for (auto [u, v] : edges_) {
        if (u >= num_tasks || v >= num_tasks)
            throw std::runtime_error("precedence edge references unknown task id");
        adj[u].push_back(v);
    }
    return adj;
}

std::vector<std::vector<int>> PrecedenceDag::predecessors_adjacency(int num_tasks) const {
    std::vector<std::vector<int>> adj(num_tasks);
    for (auto [u, v] : edges_) {
        if (u >= num_tasks || v >= num_tasks)
            throw std::runtime_error("precedence edge references unknown task id");
        adj[v].push_back(u);
    }
    return adj;
}

Instance generate_instance(const GeneratorConfig& cfg, const GridMap& map) {
    const int k = cfg.num_agents;
    const int m = cfg.num_tasks;
    const int p = cfg.num_precedence;
    if (k < 1 || m < 1) throw std::runtime_error("generator requires k >= 1 and m >= 1");
    const long long max_edges = (long long)m * (m - 1) / 2;
    if (p < 0 || p > max_edges)
        throw std::runtime_error("precedence edge count " + std::to_string(p) +
                                 " exceeds achievable acyclic count " + std::to_string(max_edges));
    if (map.passable_count() < k + m)
        throw std::runtime_error("map too small: needs at least " + std::to_string(k + m) +
                                 " passable cells, has " + std::to_string(map.passable_count()));

    std::vector<int> passable;
    passable.reserve(map.passable_count());
    for (int v = 0; v < map.size(); ++v)
        if (map.passable(v)) passable.push_back(v);

    std::mt19937_64 rng(cfg.seed);
    auto draw = [&rng](int n) { return (int)(rng() % (std::uint64_t)n); };

    Instance inst;
    inst.map = map;
    inst.map_file = cfg.map_name.empty() ? map.name() : cfg.map_name;
    inst.seed = cfg.seed;

    // Distinct starts via a partial Fisher-Yates over the passable cells.
    std::vector<int> pool = passable;
    for (int i = 0; i < k; ++i) {
        int j = i + draw((int)pool.size() - i);
        std::swap(pool[i], pool[j]);
        inst.agents.push_back({i, pool[i]});
    }

    // Goals sampled with replacement; they may repeat and may sit on starts.
    for (int t = 0; t < m; ++t) inst.tasks.push_back({t, passable[draw((int)passable.size())]});

    // Acyclic edges: orient sampled index pairs along a random permutation.
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[draw(i + 1)]);

    std::set<std::pair<int, int>> chosen;
    while ((int)chosen.size() < p) {
        int a = draw(m);
        int b = draw(m);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        chosen.insert({a, b});
    }
    for (auto [a, b] : chosen) inst.precedence.add_edge(perm[a], perm[b]);

    return inst;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

std::string write_instance(const Instance& instance) {
    json j;
    j["map_file"] = instance.map_file;
    j["map_hash"] = content_hash(write_map(instance.map));
    j["agents"] = json::array();
    for (const auto& a : instance.agents) {
        j["agents"].push_back({{"id", a.id},
                               {"start", {instance.map.col_of(a.start), instance.map.row_of(a.start)}}});
    }
    j["tasks"] = json::array();
    for (const auto& t : instance.tasks) {
        j["tasks"].push_back({{"id", t.id},
                              {"goal", {instance.map.col_of(t.goal), instance.map.row_of(t.goal)}}});
    }
    j["precedence"] = json::array();
    for (auto [u, v] : instance.precedence.edges()) j["precedence"].push_back({u, v});
    j["seed"] = instance.seed;
    return j.dump(2) + "\n";
}

Instance read_instance(const std::string& text,
                       const std::function<std::string(const std::string&)>& map_loader) {
    json j = json::parse(text);
    Instance inst;
    inst.map_file = j.at("map_file").get<std::string>();
    const std::string map_text = map_loader(inst.map_file);
    inst.map = parse_map(map_text, inst.map_file);
    const std::string expect_hash = j.at("map_hash").get<std::string>();
    const std::string got_hash = content_hash(write_map(inst.map));
    if (expect_hash != got_hash)
        throw std::runtime_error("map content hash mismatch for '" + inst.map_file + "': expected " +
                                 expect_hash + ", got " + got_hash);
    inst.seed = j.at("seed").get<std::uint64_t>();

    std::set<int> starts_seen;
    for (const auto& a : j.at("agents")) {
        AgentSpec spec;
        spec.id = a.at("id").get<int>();
        int col = a.at("start").at(0).get<int>();
        int row = a.at("start").at(1).get<int>();
        if (!inst.map.passable(col, row))
            throw std::runtime_error("agent " + std::to_string(spec.id) + " start (" +
                                     std::to_string(col) + "," + std::to_string(row) +
                                     ") is not a passable cell");
        spec.start = inst.map.index(col, row);
        if (!starts_seen.insert(spec.start).second)
            throw std::runtime_error("duplicate agent start at (" + std::to_string(col) + "," +
                                     std::to_string(row) + ")");
        if (spec.id != (int)inst.agents.size())
            throw std::runtime_error("agent ids must be dense and ascending");
        inst.agents.push_back(spec);
    }
    for (const auto& t : j.at("tasks")) {
        Task task;
        task.id = t.at("id").get<int>();
        int col = t.at("goal").at(0).get<int>();
        int row = t.at("goal").at(1).get<int>();
        if (!inst.map.passable(col, row))
            throw std::runtime_error("task " + std::to_string(task.id) + " goal (" +
                                     std::to_string(col) + "," + std::to_string(row) +
                                     ") is not a passable cell");
        task.goal = inst.map.index(col, row);
        if (task.id != (int)inst.tasks.size())
            throw std::runtime_error("task ids must be dense and ascending");
        inst.tasks.push_back(task);
    }
    if (inst.agents.empty() || inst.tasks.empty())
        throw std::runtime_error("instance requires at least one agent and one task");

    for (const auto& e : j.at("precedence")) {
        int u = e.at(0).get<int>();
        int v = e.at(1).get<int>();
        if (u < 0 || u >= inst.num_tasks() || v < 0 || v >= inst.num_tasks())
            throw std::runtime_error("precedence edge (" + std::to_string(u) + "," +
                                     std::to_string(v) + ") references unknown task id");
        inst.precedence.add_edge(u, v);
    }
    // Rejects cycles; the order itself is discarded.
    topological_order(inst.precedence, inst.num_tasks());
    return inst;
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string dir;
    auto slash = path.find_last_of("/\\");
    if (slash != std::string::npos) dir = path.substr(0, slash + 1);
    return read_instance(buf.str(), [&dir](const std::string& map_file) {
        std::ifstream map_in(dir + map_file, std::ios::binary);
        if (!map_in) throw std::runtime_error("cannot open referenced map file: " + dir + map_file);
        std::ostringstream map_buf;
        map_buf << map_in.rdbuf();
        return map_buf.str();
    });
}

void save_instance_file(const Instance& instance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << write_instance(instance);
}

std::vector<int> topological_order(const PrecedenceDag& dag, int num_tasks,
                                   const std::vector<int>* release_bounds) {
    auto succ = dag.successors_adjacency(num_tasks);
    std::vector<int> indegree(num_tasks, 0);
    for (auto [u, v] : dag.edges()) {
        (void)u;
        ++indegree[v];
    }
    auto release = [&](int t) { return release_bounds ? (*release_bounds)[t] : 0; };

    // min-heap over (release bound, id)
    using Key = std::pair<int, int>;
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> ready;
    for (int t = 0; t < num_tasks; ++t)
        if (indegree[t] == 0) ready.push({release(t), t});

    std::vector<int> order;
    order.reserve(num_tasks);
    while (!ready.empty()) {
        int t = ready.top().second;
        ready.pop();
        order.push_back(t);
        for (int s : succ[t])
            if (--indegree[s] == 0) ready.push({release(s), s});
    }
    if ((int)order.size() != num_tasks) {
        for (int t = 0; t < num_tasks; ++t)
            if (indegree[t] > 0)
                throw std::runtime_error("precedence relation is cyclic: task " + std::to_string(t) +
                                         " lies on a cycle");
    }
    return order;
}

std::vector<int> transitive_successors(const PrecedenceDag& dag, int num_tasks,
                                       const std::vector<int>& seed_tasks) {
    auto succ = dag.successors_adjacency(num_tasks);
    std::vector<bool> in_set(num_tasks, false);
    std::vector<int> stack;
    for (int t : seed_tasks) {
        if (t < 0 || t >= num_tasks) throw std::runtime_error("seed task id out of range");
        if (!in_set[t]) {
            in_set[t] = true;
            stack.push_back(t);
        }
    }
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        for (int s : succ[t]) {
            if (!in_set[s]) {
                in_set[s] = true;
                stack.push_back(s);
            }
        }
    }
    std::vector<int> out;
    for (int t = 0; t < num_tasks; ++t)
        if (in_set[t]) out.push_back(t);
    return out;
}

DagReachability::DagReachability(const PrecedenceDag& dag, int num_tasks) {
    closure_.assign(num_tasks, std::vector<bool>(num_tasks, false));
    auto succ = dag.successors_adjacency(num_tasks);
    // Process in reverse topological order so each row folds in its children.
    auto order = topological_order(dag, num_tasks);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        closure_[u][u] = true;
        for (int v : succ[u])
            for (int w = 0; w < num_tasks; ++w)
                if (closure_[v][w]) closure_[u][w] = true;
    }
}

}  // namespace tapfpc

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "tapfpc/instance.hpp"
#include "test_support.hpp"

using namespace tapfpc;
using namespace tapfpc::testing;

TEST_CASE("degenerate generator configuration") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    Instance inst = random_instance(map, 1, 1, 0, 7);
    CHECK(inst.num_agents() == 1);
    CHECK(inst.num_tasks() == 1);
    CHECK(inst.precedence.empty());
    CHECK(inst.map.passable(inst.agent_start(0)));
    CHECK(inst.map.passable(inst.task_goal(0)));
}

TEST_CASE("benchmark tier configuration on empty-16-16") {
    GridMap map = load_map_file(data_path("maps/empty-16-16.map"));
    Instance inst = random_instance(map, 10, 100, 80, 11);
    CHECK(inst.num_agents() == 10);
    CHECK(inst.num_tasks() == 100);
    CHECK(inst.precedence.edge_count() == 80);
    // A topological order must exist (acyclic sampling).
    auto order = topological_order(inst.precedence, 100);
    CHECK((int)order.size() == 100);
    // Starts pairwise distinct.
    std::set<int> starts;
    for (const auto& a : inst.agents) starts.insert(a.start);
    CHECK((int)starts.size() == 10);
}

TEST_CASE("generation is deterministic") {
    GridMap map = load_map_file(data_path("maps/empty-16-16.map"));
    Instance a = random_instance(map, 5, 15, 8, 99);
    Instance b = random_instance(map, 5, 15, 8, 99);
    CHECK(write_instance(a) == write_instance(b));
    Instance c = random_instance(map, 5, 15, 8, 100);
    CHECK(write_instance(a) != write_instance(c));
}

TEST_CASE("generator rejects impossible configurations") {
    GridMap tiny = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n");
    CHECK_THROWS_WITH_AS(random_instance(tiny, 2, 2, 0, 1), doctest::Contains("too small"),
                         std::runtime_error);
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    CHECK_THROWS_WITH_AS(random_instance(map, 1, 3, 4, 1), doctest::Contains("exceeds"),
                         std::runtime_error);
}

TEST_CASE("instance file round trip") {
    Instance inst = crossover_instance();
    const std::string text = write_instance(inst);
    auto loader = [&](const std::string&) { return write_map(inst.map); };
    Instance back = read_instance(text, loader);
    CHECK(write_instance(back) == text);
    CHECK(back.num_agents() == 2);
    CHECK(back.num_tasks() == 4);
    CHECK(back.precedence.edge_count() == 2);
}

TEST_CASE("instance files reject invariant violations") {
    Instance inst = crossover_instance();
    auto loader = [&](const std::string&) { return write_map(inst.map); };
    std::string text = write_instance(inst);

    SUBCASE("self-loop") {
        std::string bad = text;
        bad.replace(bad.find("      0,\n      1"), 16, "      0,\n      0");
        CHECK_THROWS_WITH_AS(read_instance(bad, loader), doctest::Contains("self-loop"),
                             std::runtime_error);
    }
    SUBCASE("cycle") {
        std::string bad = text;
        bad.replace(bad.find("      2,\n      3"), 16, "      1,\n      0");
        CHECK_THROWS_WITH_AS(read_instance(bad, loader), doctest::Contains("cyclic"),
                             std::runtime_error);
    }
    SUBCASE("dangling task id") {
        std::string bad = text;
        bad.replace(bad.find("      2,\n      3"), 16, "      2,\n      9");
        CHECK_THROWS_WITH_AS(read_instance(bad, loader), doctest::Contains("unknown task"),
                             std::runtime_error);
    }
    SUBCASE("map hash mismatch") {
        auto other = [&](const std::string&) {
            return std::string("type octile\nheight 1\nwidth 1\nmap\n.\n");
        };
        CHECK_THROWS_WITH_AS(read_instance(text, other), doctest::Contains("hash"),
                             std::runtime_error);
    }
}

TEST_CASE("topological order tie-breaks") {
    SUBCASE("empty dag uses id order") {
        PrecedenceDag dag;
        CHECK(topological_order(dag, 3) == std::vector<int>{0, 1, 2});
    }
    SUBCASE("chain") {
        PrecedenceDag dag;
        dag.add_edge(0, 1);
        dag.add_edge(1, 2);
        CHECK(topological_order(dag, 3) == std::vector<int>{0, 1, 2});
    }
    SUBCASE("crossover precedence") {
        Instance inst = crossover_instance();
        auto order = topological_order(inst.precedence, 4);
        auto pos = [&](int t) {
            return std::find(order.begin(), order.end(), t) - order.begin();
        };
        CHECK(pos(0) < pos(1));
        CHECK(pos(2) < pos(3));
    }
    SUBCASE("release bounds reorder ready tasks") {
        PrecedenceDag dag;
        std::vector<int> release = {5, 0, 3};
        CHECK(topological_order(dag, 3, &release) == std::vector<int>{1, 2, 0});
    }
    SUBCASE("cycle is named") {
        PrecedenceDag dag;
        dag.add_edge(0, 1);
        dag.add_edge(1, 0);
        CHECK_THROWS_WITH_AS(topological_order(dag, 2), doctest::Contains("cyclic"),
                             std::runtime_error);
    }
}

TEST_CASE("transitive successors") {
    SUBCASE("empty seed") {
        PrecedenceDag dag;
        dag.add_edge(0, 1);
        CHECK(transitive_successors(dag, 2, {}).empty());
    }
    SUBCASE("crossover seed g1") {
        Instance inst = crossover_instance();
        CHECK(transitive_successors(inst.precedence, 4, {0}) == std::vector<int>{0, 1});
    }
    SUBCASE("chain closure") {
        PrecedenceDag dag;
        dag.add_edge(0, 1);
        dag.add_edge(1, 2);
        CHECK(transitive_successors(dag, 3, {0}) == std::vector<int>{0, 1, 2});
    }
}

TEST_CASE("closure is a fixed point containing the seed") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 2 + (int)(rng() % 12);
        PrecedenceDag dag;
        std::set<std::pair<int, int>> used;
        const int edges = (int)(rng() % (m * 2));
        for (int e = 0; e < edges; ++e) {
            int u = (int)(rng() % m), v = (int)(rng() % m);
            if (u == v) continue;
            if (u > v) std::swap(u, v);  // orient by id: acyclic by construction
            if (used.insert({u, v}).second) dag.add_edge(u, v);
        }
        std::vector<int> seed;
        for (int t = 0; t < m; ++t)
            if (rng() % 3 == 0) seed.push_back(t);
        auto closed = transitive_successors(dag, m, seed);
        for (int s : seed) CHECK(std::count(closed.begin(), closed.end(), s) == 1);
        auto twice = transitive_successors(dag, m, closed);
        CHECK(twice == closed);
        // No edge escapes the set forward.
        std::set<int> in(closed.begin(), closed.end());
        for (auto [u, v] : dag.edges())
            if (in.count(u)) CHECK(in.count(v) == 1);
    }
}

TEST_CASE("dag reachability matches edge closure") {
    Instance inst = crossover_instance();
    DagReachability reach(inst.precedence, 4);
    CHECK(reach.reaches(0, 1));
    CHECK(reach.reaches(2, 3));
    CHECK(reach.reaches(0, 0));
    CHECK(!reach.reaches(1, 0));
    CHECK(!reach.reaches(0, 2));
}

TEST_CASE("instance save/load through disk with map reference") {
    Instance inst = crossover_instance();
    const std::string dir = "/tmp/tapfpc_test_instance";
    std::filesystem::create_directories(dir);
    std::ofstream map_out(dir + "/crossover-7x4.map");
    map_out << write_map(inst.map);
    map_out.close();
    save_instance_file(inst, dir + "/crossover.json");
    Instance back = load_instance_file(dir + "/crossover.json");
    CHECK(back.num_tasks() == 4);
    CHECK(back.task_goal(3) == back.map.index(5, 3));
}

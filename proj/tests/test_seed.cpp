#include <doctest.h>

#include "tapfpc/seed.hpp"
#include "test_support.hpp"

using namespace tapfpc;
using namespace tapfpc::testing;

TEST_CASE("single agent receives every task in topological-consistent order") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    Instance inst = random_instance(map, 1, 6, 5, 3);
    DistanceTable dist(map);
    Assignment a = greedy_assign(inst, dist);
    REQUIRE(a.sequences.size() == 1);
    CHECK((int)a.sequences[0].size() == 6);
    CHECK(a.is_partition(6));
    // Position map respects every precedence edge.
    std::vector<int> pos(6);
    for (int i = 0; i < 6; ++i) pos[a.sequences[0][i]] = i;
    for (auto [u, v] : inst.precedence.edges()) CHECK(pos[u] < pos[v]);
}

TEST_CASE("single task goes to the nearer agent with its distance as estimate") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 8\nmap\n........\n");
    Instance inst;
    inst.map = map;
    inst.agents = {{0, map.index(0, 0)}, {1, map.index(7, 0)}};
    inst.tasks = {{0, map.index(4, 0)}};  // distances 4 and 3
    DistanceTable dist(map);
    Assignment a = greedy_assign(inst, dist);
    CHECK(a.sequences[0].empty());
    CHECK(a.sequences[1] == std::vector<int>{0});
}

TEST_CASE("greedy assignment is always a partition with readiness discipline") {
    GridMap map = load_map_file(data_path("maps/empty-16-16.map"));
    DistanceTable dist(map);
    for (int trial = 0; trial < 15; ++trial) {
        Instance inst = random_instance(map, 4, 12, 10, 500 + trial);
        Assignment a = greedy_assign(inst, dist);
        CHECK(a.is_partition(12));
        // No task precedes an unassigned predecessor on any agent: the
        // assignment order itself must have been precedence-ready.
        std::vector<int> owner(12, -1), pos(12, -1);
        for (int ag = 0; ag < 4; ++ag)
            for (int i = 0; i < (int)a.sequences[ag].size(); ++i) {
                owner[a.sequences[ag][i]] = ag;
                pos[a.sequences[ag][i]] = i;
            }
        for (auto [u, v] : inst.precedence.edges())
            if (owner[u] == owner[v]) CHECK(pos[u] < pos[v]);
    }
}

TEST_CASE("crossover seed pipeline yields a valid solution") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);
    SeedOptions options;
    SeedResult seed = build_seed(inst, options, dist);
    REQUIRE(seed.found);
    CHECK(validate_solution(inst, seed.solution).ok());
    CHECK(seed.solution.soc >= 9);  // never better than the flexible optimum
}

TEST_CASE("crossover forced fixed assignment reproduces cost 15") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);
    SeedOptions options;
    options.forced_assignment = crossover_fixed_assignment();
    SeedResult seed = build_seed(inst, options, dist);
    REQUIRE(seed.found);
    CHECK(seed.solution.soc == 15);
    CHECK(validate_solution(inst, seed.solution).ok());
}

TEST_CASE("single-agent chain seed equals the direct plan cost") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    Instance inst;
    inst.map = map;
    inst.agents = {{0, map.index(0, 0)}};
    inst.tasks = {{0, map.index(3, 0)}, {1, map.index(3, 3)}, {2, map.index(0, 3)}};
    inst.precedence.add_edge(0, 1);
    inst.precedence.add_edge(1, 2);
    SeedOptions options;
    SeedResult seed = build_seed(inst, options, dist);
    REQUIRE(seed.found);
    ReservationTable res;
    auto direct = plan_mla_star(map, map.index(0, 0),
                                {map.index(3, 0), map.index(3, 3), map.index(0, 3)},
                                StageBounds::unbounded(3), res, dist);
    REQUIRE(direct.found);
    CHECK(seed.solution.soc == direct.completion_time());
}

TEST_CASE("twenty random instances all seed successfully") {
    GridMap map = load_map_file(data_path("maps/empty-16-16.map"));
    DistanceTable dist(map);
    int seeded = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = random_instance(map, 5, 15, 8, 9000 + trial);
        SeedOptions options;
        SeedResult seed = build_seed(inst, options, dist);
        REQUIRE(seed.found);
        CHECK(validate_solution(inst, seed.solution).ok());
        ++seeded;
    }
    CHECK(seeded == 20);
}

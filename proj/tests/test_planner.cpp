#include <doctest.h>

#include <random>

#include "tapfpc/planner.hpp"
#include "tapfpc/solution.hpp"
#include "test_support.hpp"

using namespace tapfpc;
using namespace tapfpc::testing;

namespace {

StageBounds open_bounds(int stages) { return StageBounds::unbounded(stages); }

// Random reservations shaped like other agents: a handful of short walks
// plus one parked obstacle.
ReservationTable random_reservations(const GridMap& map, std::mt19937_64& rng, int walkers,
                                     int exclude_vertex) {
    ReservationTable res;
    for (int w = 0; w < walkers; ++w) {
        TimedPath path;
        int v = -1;
        do {
            v = (int)(rng() % map.size());
        } while (!map.passable(v) || v == exclude_vertex);
        path.vertices.push_back(v);
        const int len = 2 + (int)(rng() % 12);
        for (int s = 0; s < len; ++s) {
            auto nbrs = map.neighbors(path.vertices.back());
            nbrs.push_back(path.vertices.back());
            path.vertices.push_back(nbrs[rng() % nbrs.size()]);
        }
        res.add_path(path);
    }
    return res;
}

}  // namespace

TEST_CASE("single adjacent goal costs one step") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    ReservationTable res;
    auto r = plan_mla_star(map, map.index(0, 0), {map.index(1, 0)}, open_bounds(1), res, dist);
    REQUIRE(r.found);
    CHECK(r.completion_time() == 1);
    CHECK(r.path.length() == 2);
}

TEST_CASE("crossover agent a1 stage completions") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);
    ReservationTable res;
    auto r = plan_mla_star(inst.map, inst.agent_start(0),
                           {inst.task_goal(0), inst.task_goal(1)}, open_bounds(2), res, dist);
    REQUIRE(r.found);
    CHECK(r.stage_completions == std::vector<int>{4, 5});
}

TEST_CASE("lower bounds defer completion by waiting") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    ReservationTable res;
    StageBounds bounds = open_bounds(1);
    bounds.lower[0] = 5;
    auto r = plan_mla_star(map, map.index(0, 0), {map.index(1, 0)}, bounds, res, dist);
    REQUIRE(r.found);
    CHECK(r.completion_time() == 5);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(1, 0)}, bounds, res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == 5);
}

TEST_CASE("upper bound below grid distance is infeasible") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    ReservationTable res;
    StageBounds bounds = open_bounds(1);
    bounds.upper[0] = 3;
    auto r = plan_mla_star(map, map.index(0, 0), {map.index(5, 0)}, bounds, res, dist);
    CHECK(!r.found);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(5, 0)}, bounds, res, dist);
    CHECK(!s.found);
}

TEST_CASE("consecutive identical goals complete one step apart") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    ReservationTable res;
    const int g = map.index(2, 0);
    auto r = plan_mla_star(map, map.index(0, 0), {g, g, g}, open_bounds(3), res, dist);
    REQUIRE(r.found);
    CHECK(r.stage_completions == std::vector<int>{2, 3, 4});
    auto s = plan_sipps(map, map.index(0, 0), {g, g, g}, open_bounds(3), res, dist);
    REQUIRE(s.found);
    CHECK(s.stage_completions == std::vector<int>{2, 3, 4});
}

TEST_CASE("goal at start can complete at time zero") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    ReservationTable res;
    const int s0 = map.index(3, 3);
    auto r = plan_mla_star(map, s0, {s0}, open_bounds(1), res, dist);
    REQUIRE(r.found);
    CHECK(r.completion_time() == 0);
    CHECK(r.path.length() == 1);
    auto s = plan_sipps(map, s0, {s0}, open_bounds(1), res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == 0);
}

TEST_CASE("parked obstacles forbid finishing on top of them") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 4\nmap\n....\n");
    DistanceTable dist(map);
    ReservationTable res;
    TimedPath blocker;
    blocker.vertices = {map.index(3, 0)};  // parked forever at the goal
    res.add_path(blocker);
    auto r = plan_mla_star(map, map.index(0, 0), {map.index(3, 0)}, open_bounds(1), res, dist);
    CHECK(!r.found);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(3, 0)}, open_bounds(1), res, dist);
    CHECK(!s.found);
}

TEST_CASE("waiting lets a crossing agent pass") {
    GridMap map = parse_map("type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n");
    DistanceTable dist(map);
    ReservationTable res;
    TimedPath crosser;
    // Moves down the middle column, parking at the bottom.
    crosser.vertices = {map.index(1, 0), map.index(1, 1), map.index(1, 2)};
    res.add_path(crosser);
    // Crossing the middle row now requires timing around (1,1) at t=1.
    auto r = plan_mla_star(map, map.index(0, 1), {map.index(2, 1)}, open_bounds(1), res, dist);
    REQUIRE(r.found);
    CHECK(r.completion_time() >= 2);
    auto s = plan_sipps(map, map.index(0, 1), {map.index(2, 1)}, open_bounds(1), res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == r.completion_time());
}

TEST_CASE("sipps avoids soft reservations when an equal-cost detour exists") {
    GridMap map = parse_map("type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n");
    DistanceTable dist(map);
    // Both L-routes from (0,0) to (1,1) cost 2; make one of them soft.
    ReservationTable res;
    res.add_soft_vertex(map.index(1, 0), 1);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(1, 1)}, open_bounds(1), res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == 2);
    CHECK(s.soft_conflicts == 0);
    CHECK(s.path.vertices[1] == map.index(0, 1));  // the clean corner
}

TEST_CASE("sipps reports unavoidable soft collisions") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n");
    DistanceTable dist(map);
    ReservationTable res;
    res.add_soft_vertex(map.index(1, 0), 1);  // the only corridor cell
    StageBounds bounds = open_bounds(1);
    bounds.upper[0] = 2;  // no time to wait the reservation out
    auto s = plan_sipps(map, map.index(0, 0), {map.index(2, 0)}, bounds, res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == 2);
    CHECK(s.soft_conflicts == 1);
}

TEST_CASE("sipps dodges a soft reservation by waiting when time allows") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n");
    DistanceTable dist(map);
    ReservationTable res;
    res.add_soft_vertex(map.index(1, 0), 1);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(2, 0)}, open_bounds(1), res, dist);
    REQUIRE(s.found);
    CHECK(s.completion_time() == 3);
    CHECK(s.soft_conflicts == 0);
}

TEST_CASE("sipps lexicographic objective prefers fewer collisions over speed") {
    GridMap map = parse_map("type octile\nheight 2\nwidth 4\nmap\n....\n....\n");
    DistanceTable dist(map);
    ReservationTable res;
    // Soft block across the short row; the detour costs 2 extra steps.
    res.add_soft_vertex(map.index(1, 0), 1);
    res.add_soft_vertex(map.index(2, 0), 2);
    auto s = plan_sipps(map, map.index(0, 0), {map.index(3, 0)}, open_bounds(1), res, dist);
    REQUIRE(s.found);
    CHECK(s.soft_conflicts == 0);
    CHECK(s.completion_time() > 3);
}

TEST_CASE("sipps dodges an oncoming soft path entirely") {
    GridMap map = parse_map("type octile\nheight 2\nwidth 4\nmap\n....\n....\n");
    DistanceTable dist(map);
    ReservationTable res;
    TimedPath oncoming;
    oncoming.owner = 1;
    // Marches down row 0 toward our start, then parks off to the side.
    for (auto [c, r] : std::vector<std::pair<int, int>>{{3, 0}, {2, 0}, {1, 0}, {1, 1}})
        oncoming.vertices.push_back(map.index(c, r));
    res.add_path(oncoming, /*soft_in_transit=*/true);

    auto s = plan_sipps(map, map.index(0, 0), {map.index(3, 0)}, StageBounds::unbounded(1), res,
                        dist);
    REQUIRE(s.found);
    CHECK(s.soft_conflicts == 0);
    // Row 1 detour or timed row-0 passage; either way no collision with the
    // soft walker at any step.
    for (int t = 1; t < 8; ++t) {
        CHECK(s.path.at(t) != oncoming.at(t));
        bool swap = s.path.at(t) == oncoming.at(t - 1) && s.path.at(t - 1) == oncoming.at(t);
        CHECK(!swap);
    }
}

TEST_CASE("planner equivalence on random hard instances") {
    std::mt19937_64 rng(2024);
    int feasible = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const int w = 5 + (int)(rng() % 8), h = 5 + (int)(rng() % 8);
        std::string text = "type octile\nheight " + std::to_string(h) + "\nwidth " +
                           std::to_string(w) + "\nmap\n";
        std::vector<int> open_cells;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                bool open_cell = rng() % 6 != 0;
                text += open_cell ? '.' : '@';
                if (open_cell) open_cells.push_back(r * w + c);
            }
            text += '\n';
        }
        if (open_cells.empty()) continue;
        GridMap map = parse_map(text);
        DistanceTable dist(map);
        const int start = open_cells[rng() % open_cells.size()];
        const int stages = 1 + (int)(rng() % 4);
        std::vector<int> goals;
        for (int g = 0; g < stages; ++g) goals.push_back(open_cells[rng() % open_cells.size()]);
        StageBounds bounds = open_bounds(stages);
        if (rng() % 3 == 0) bounds.lower[rng() % stages] = (int)(rng() % 10);
        if (rng() % 4 == 0) bounds.upper[rng() % stages] = 3 + (int)(rng() % 30);
        ReservationTable res = random_reservations(map, rng, 1 + (int)(rng() % 3), start);

        auto a = plan_mla_star(map, start, goals, bounds, res, dist);
        auto b = plan_sipps(map, start, goals, bounds, res, dist);
        CHECK(a.found == b.found);
        if (a.found && b.found) {
            ++feasible;
            CHECK(a.completion_time() == b.completion_time());
            CHECK(b.soft_conflicts == 0);
        }
    }
    CHECK(feasible > 40);  // the comparison must not be vacuous
}

TEST_CASE("bound compliance is honored on random bounded queries") {
    std::mt19937_64 rng(77);
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    for (int trial = 0; trial < 60; ++trial) {
        const int stages = 1 + (int)(rng() % 3);
        std::vector<int> goals;
        for (int g = 0; g < stages; ++g) goals.push_back((int)(rng() % map.size()));
        StageBounds bounds = open_bounds(stages);
        for (int j = 0; j < stages; ++j) {
            bounds.lower[j] = (int)(rng() % 8);
            if (rng() % 2) bounds.upper[j] = bounds.lower[j] + (int)(rng() % 20);
        }
        ReservationTable res;
        const int start = map.index(0, 0);
        for (auto* plan : {&plan_mla_star, &plan_sipps}) {
            auto r = (*plan)(map, start, goals, bounds, res, dist, 0);
            if (!r.found) continue;
            for (int j = 0; j < stages; ++j) {
                CHECK(r.stage_completions[j] >= bounds.lower[j]);
                CHECK(r.stage_completions[j] <= bounds.upper[j]);
                if (j > 0) CHECK(r.stage_completions[j] > r.stage_completions[j - 1]);
            }
        }
    }
}

TEST_CASE("mla* never beats a hand-built feasible path") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);
    ReservationTable res;
    // Hand path for a1 visiting g1 then g4: along row 3 (9 steps total).
    auto r = plan_mla_star(inst.map, inst.agent_start(0),
                           {inst.task_goal(0), inst.task_goal(3)}, open_bounds(2), res, dist);
    REQUIRE(r.found);
    CHECK(r.completion_time() <= 8);  // the hand-built path completes at 8
}

TEST_CASE("evasion finds a safe parking spot") {
    GridMap map = parse_map("type octile\nheight 2\nwidth 4\nmap\n....\n....\n");
    ReservationTable res;
    TimedPath raider;
    raider.vertices = {map.index(3, 0), map.index(2, 0), map.index(1, 0), map.index(0, 0)};
    res.add_path(raider);  // ends parked on our start
    auto r = plan_evasion(map, map.index(0, 0), res);
    REQUIRE(r.found);
    CHECK(r.path.vertices.back() != map.index(0, 0));
    // The evader's trajectory must dodge the raider at every step.
    for (int t = 0; t < 10; ++t) {
        CHECK(r.path.at(t) != raider.at(t));
        if (t > 0) {
            bool swap = r.path.at(t) == raider.at(t - 1) && r.path.at(t - 1) == raider.at(t);
            CHECK(!swap);
        }
    }
}

TEST_CASE("evasion on a blocked corridor is infeasible") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 4\nmap\n....\n");
    ReservationTable res;
    TimedPath raider;
    raider.vertices = {map.index(3, 0), map.index(2, 0), map.index(1, 0), map.index(0, 0)};
    res.add_path(raider);
    auto r = plan_evasion(map, map.index(0, 0), res);
    CHECK(!r.found);  // a 1-wide corridor leaves nowhere to dodge
}

TEST_CASE("derive stage bounds from frozen context") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);

    TimingContext timing;
    timing.completion.assign(4, kInf);
    timing.frozen.assign(4, false);

    SUBCASE("no frozen predecessors means zero lower bound") {
        auto b = derive_stage_bounds({0}, inst, timing, dist, inst.agent_start(0));
        CHECK(b.lower[0] == 4);  // travel floor from the start
        CHECK(b.upper[0] == kInf);
        auto c = derive_stage_bounds({2}, inst, timing, dist, inst.agent_start(1));
        CHECK(c.lower[0] == 3);
    }
    SUBCASE("frozen predecessor at 7 induces lower bound 8") {
        timing.completion[0] = 7;
        timing.frozen[0] = true;
        auto b = derive_stage_bounds({1}, inst, timing, dist, inst.agent_start(0));
        CHECK(b.lower[0] == 8);
    }
    SUBCASE("frozen successor at 12 induces upper bound 11") {
        timing.completion[1] = 12;
        timing.frozen[1] = true;
        auto b = derive_stage_bounds({0}, inst, timing, dist, inst.agent_start(0));
        CHECK(b.upper[0] == 11);
    }
    SUBCASE("interior estimates bound but interior successors do not") {
        timing.completion[0] = 7;
        timing.frozen[0] = false;  // interior estimate
        timing.completion[1] = 12;
        timing.frozen[1] = false;
        auto b = derive_stage_bounds({0}, inst, timing, dist, inst.agent_start(0));
        CHECK(b.upper[0] == kInf);  // interior successors impose no deadline
        auto c = derive_stage_bounds({1}, inst, timing, dist, inst.agent_start(0));
        CHECK(c.lower[0] == 8);  // interior estimates still gate release
    }
    SUBCASE("forward propagation accumulates travel") {
        auto b = derive_stage_bounds({0, 3}, inst, timing, dist, inst.agent_start(0));
        CHECK(b.lower[0] == 4);
        CHECK(b.lower[1] == 8);  // 4 + distance(g1, g4) = 4 + 4
    }
    SUBCASE("infeasible window is reported") {
        timing.completion[1] = 3;  // successor frozen at 3 → upper 2 < travel 4
        timing.frozen[1] = true;
        auto b = derive_stage_bounds({0}, inst, timing, dist, inst.agent_start(0));
        CHECK(!b.feasible());
    }
}

TEST_CASE("pbs solves crossover fixed and flexible assignments") {
    Instance inst = crossover_instance();
    DistanceTable dist(inst.map);
    PbsOptions options;
    std::vector<int> agents = {0, 1};

    auto fixed = solve_pbs_pc(inst, crossover_fixed_assignment(), agents, nullptr, options, dist);
    REQUIRE(fixed.found);
    CHECK(fixed.soc == 15);

    auto flex =
        solve_pbs_pc(inst, crossover_flexible_assignment(), agents, nullptr, options, dist);
    REQUIRE(flex.found);
    CHECK(flex.soc == 9);
}

TEST_CASE("single agent pbs equals mla*") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    Instance inst;
    inst.map = map;
    inst.agents = {{0, map.index(0, 0)}};
    inst.tasks = {{0, map.index(4, 4)}, {1, map.index(1, 3)}};
    Assignment assignment;
    assignment.sequences = {{0, 1}};
    PbsOptions options;
    auto pbs = solve_pbs_pc(inst, assignment, {0}, nullptr, options, dist);
    REQUIRE(pbs.found);
    ReservationTable res;
    auto direct = plan_mla_star(map, map.index(0, 0), {map.index(4, 4), map.index(1, 3)},
                                StageBounds::unbounded(2), res, dist);
    REQUIRE(direct.found);
    CHECK(pbs.soc == direct.completion_time());
}

TEST_CASE("pbs respects a frozen exterior") {
    GridMap map = parse_map("type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n");
    DistanceTable dist(map);
    Instance inst;
    inst.map = map;
    inst.agents = {{0, map.index(0, 1)}, {1, map.index(1, 0)}};
    inst.tasks = {{0, map.index(2, 1)}, {1, map.index(1, 2)}};
    Assignment assignment;
    assignment.sequences = {{0}, {1}};

    ExteriorContext exterior;
    TimedPath frozen_path;
    frozen_path.owner = 1;
    frozen_path.vertices = {map.index(1, 0), map.index(1, 1), map.index(1, 2)};
    exterior.paths.push_back(frozen_path);
    exterior.frozen_completions = {-1, 2};

    PbsOptions options;
    auto res = solve_pbs_pc(inst, assignment, {0}, &exterior, options, dist);
    REQUIRE(res.found);
    // The straight corridor through (1,1) at t=1 is blocked by the exterior.
    CHECK(res.soc > 2);
    // Hard mode: the replanned path must not collide with the frozen one.
    for (int t = 0; t < 10; ++t) CHECK(res.paths[0].at(t) != frozen_path.at(t));
}

TEST_CASE("pbs hard mode outputs validate cleanly") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        Instance inst = random_instance(map, 3, 6, 3, 1000 + trial);
        Assignment assignment;
        assignment.sequences.resize(3);
        // Round-robin topological assignment.
        auto order = topological_order(inst.precedence, 6);
        for (int i = 0; i < 6; ++i) assignment.sequences[i % 3].push_back(order[i]);
        PbsOptions options;
        std::vector<int> agents = {0, 1, 2};
        auto res = solve_pbs_pc(inst, assignment, agents, nullptr, options, dist);
        if (!res.found) continue;
        Solution sol;
        sol.assignment = assignment;
        sol.paths.resize(3);
        for (int i = 0; i < (int)res.agents.size(); ++i) sol.paths[res.agents[i]] = res.paths[i];
        REQUIRE(retime_solution(inst, sol));
        CHECK(validate_solution(inst, sol).ok());
    }
}

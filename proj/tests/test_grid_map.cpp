#include <doctest.h>

#include <random>

#include "tapfpc/grid_map.hpp"
#include "test_support.hpp"

using namespace tapfpc;
using namespace tapfpc::testing;

TEST_CASE("parse smallest legal map") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 1\nmap\n.\n");
    CHECK(map.width() == 1);
    CHECK(map.height() == 1);
    CHECK(map.passable_count() == 1);
}

TEST_CASE("parse 1x3 with a wall") {
    GridMap map = parse_map("type octile\nheight 1\nwidth 3\nmap\n.@.\n");
    CHECK(map.passable(0));
    CHECK(!map.passable(1));
    CHECK(map.passable(2));
    CHECK(map.passable_count() == 2);
}

TEST_CASE("parse glyph variants") {
    GridMap map = parse_map("type octile\nheight 2\nwidth 2\nmap\n.G\nT@\n");
    CHECK(map.passable(0));
    CHECK(map.passable(1));
    CHECK(!map.passable(2));
    CHECK(!map.passable(3));
}

TEST_CASE("parse errors name the offending line") {
    CHECK_THROWS_WITH_AS(parse_map("type quad\nheight 1\nwidth 1\nmap\n.\n"),
                         doctest::Contains("line 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight x\nwidth 1\nmap\n.\n"),
                         doctest::Contains("line 2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight 1\nwidth 3\nmap\n..\n"),
                         doctest::Contains("line 5"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_map("type octile\nheight 1\nwidth 3\nmap\n.x.\n"),
                         doctest::Contains("line 5"), std::runtime_error);
    CHECK_THROWS_AS(parse_map("type octile\nheight 2\nwidth 1\nmap\n.\n"), std::runtime_error);
}

TEST_CASE("empty-16-16 has 256 passable cells") {
    GridMap map = load_map_file(data_path("maps/empty-16-16.map"));
    CHECK(map.width() == 16);
    CHECK(map.height() == 16);
    CHECK(map.passable_count() == 256);
}

TEST_CASE("crossover grid distances") {
    GridMap map = load_map_file(data_path("maps/crossover-7x4.map"));
    DistanceTable dist(map);
    CHECK(!map.passable(2, 1));
    CHECK(!map.passable(3, 1));

    const int a = map.index(0, 0), b = map.index(1, 3);
    CHECK(bfs_oracle(map, a, b) == 4);
    CHECK(dist.distance(a, b) == 4);

    const int c = map.index(6, 0), d = map.index(1, 2);
    CHECK(bfs_oracle(map, c, d) == 7);
    CHECK(dist.distance(c, d) == 7);
}

TEST_CASE("identity distance is zero") {
    GridMap map = load_map_file(data_path("maps/empty-6-6.map"));
    DistanceTable dist(map);
    for (int v = 0; v < map.size(); ++v) CHECK(dist.distance(v, v) == 0);
}

TEST_CASE("distances match an independent BFS on random maps") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 4; ++trial) {
        const int w = 8 + (int)(rng() % 10), h = 8 + (int)(rng() % 10);
        std::string text = "type octile\nheight " + std::to_string(h) + "\nwidth " +
                           std::to_string(w) + "\nmap\n";
        std::vector<int> passable;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                bool open = rng() % 5 != 0 || (r == 0 && c == 0);
                text += open ? '.' : '@';
                if (open) passable.push_back(r * w + c);
            }
            text += '\n';
        }
        GridMap map = parse_map(text);
        DistanceTable dist(map);
        for (int q = 0; q < 250; ++q) {
            int u = passable[rng() % passable.size()];
            int v = passable[rng() % passable.size()];
            int expect = bfs_oracle(map, u, v);
            int got = dist.distance(u, v);
            if (expect < 0)
                CHECK(got >= kInf);
            else
                CHECK(got == expect);
        }
    }
}

TEST_CASE("memoization is order independent") {
    GridMap map = load_map_file(data_path("maps/crossover-7x4.map"));
    DistanceTable forward(map), backward(map);
    std::vector<std::pair<int, int>> queries;
    for (int u = 0; u < map.size(); ++u)
        for (int v = 0; v < map.size(); ++v)
            if (map.passable(u) && map.passable(v)) queries.push_back({u, v});
    std::vector<int> a, b;
    for (auto [u, v] : queries) a.push_back(forward.distance(u, v));
    for (auto it = queries.rbegin(); it != queries.rend(); ++it)
        b.push_back(backward.distance(it->first, it->second));
    std::reverse(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("distance symmetry and triangle inequality") {
    GridMap map = load_map_file(data_path("maps/crossover-7x4.map"));
    DistanceTable dist(map);
    std::vector<int> cells;
    for (int v = 0; v < map.size(); ++v)
        if (map.passable(v)) cells.push_back(v);
    for (int u : cells)
        for (int v : cells) {
            CHECK(dist.distance(u, v) == dist.distance(v, u));
            for (int w : cells)
                CHECK(dist.distance(u, v) <= dist.distance(u, w) + dist.distance(w, v));
        }
}

TEST_CASE("map writer round trip") {
    GridMap map = load_map_file(data_path("maps/crossover-7x4.map"));
    GridMap again = parse_map(write_map(map));
    CHECK(again.width() == map.width());
    CHECK(again.height() == map.height());
    for (int v = 0; v < map.size(); ++v) CHECK(again.passable(v) == map.passable(v));
}

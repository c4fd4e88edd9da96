#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace tapfpc {

// Sentinel for "no path" / "no bound". Large enough to dominate any real
// timestep, small enough that sums of a few of them do not overflow int.
constexpr int kInf = std::numeric_limits<int>::max() / 4;

// 4-connected grid with blocked cells. Vertices are flattened row-major
// cell indices: index = row * width + col. Immutable after parsing.
class GridMap {
public:
    GridMap() = default;
    GridMap(int width, int height, std::vector<bool> blocked, std::string name = "");

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }
    const std::string& name() const { return name_; }

    bool in_bounds(int col, int row) const {
        return 0 <= col && col < width_ && 0 <= row && row < height_;
    }
    int index(int col, int row) const { return row * width_ + col; }
    int col_of(int v) const { return v % width_; }
    int row_of(int v) const { return v / width_; }

    bool passable(int v) const { return !blocked_[v]; }
    bool passable(int col, int row) const {
        return in_bounds(col, row) && !blocked_[index(col, row)];
    }
    int passable_count() const { return passable_count_; }

    // 4-neighborhood of v restricted to passable cells, in a fixed order
    // (up, left, right, down by index delta). Order matters for tie-breaks.
    void neighbors(int v, std::vector<int>& out) const;
    std::vector<int> neighbors(int v) const;

    bool adjacent_or_equal(int u, int v) const;

    int manhattan(int u, int v) const {
        return std::abs(col_of(u) - col_of(v)) + std::abs(row_of(u) - row_of(v));
    }

private:
    int width_ = 0;
    int height_ = 0;
    int passable_count_ = 0;
    std::vector<bool> blocked_;
    std::string name_;
};

// Parses MovingAI map content:
//   type octile / height H / width W / map / H rows of W glyphs.
// Glyphs: '.' and 'G' passable, '@' and 'T' blocked.
// Throws std::runtime_error naming the offending line on malformed input.
GridMap parse_map(const std::string& text, const std::string& name = "");

// Reads a map file from disk and parses it.
GridMap load_map_file(const std::string& path);

// Renders a map back to MovingAI format ('.' and '@' glyphs only).
std::string write_map(const GridMap& map);

// Memoized exact grid distances. Queries run a full breadth-first layer
// expansion from one endpoint and cache it, so repeated queries against
// the same source (task goals, starts) are O(1).
class DistanceTable {
public:
    explicit DistanceTable(const GridMap& map) : map_(&map) {}

    // Minimum number of unit moves between u and v, or kInf if unreachable.
    int distance(int u, int v);

    // Full distance field from source (kInf where unreachable).
    const std::vector<int>& field(int source);

    bool has_source(int source) const { return fields_.count(source) > 0; }
    const GridMap& map() const { return *map_; }

private:
    const GridMap* map_;
    std::unordered_map<int, std::vector<int>> fields_;
};

}  // namespace tapfpc

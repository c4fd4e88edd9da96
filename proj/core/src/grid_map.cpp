#include "tapfpc/grid_map.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tapfpc {

GridMap::GridMap(int width, int height, std::vector<bool> blocked, std::string name)
    : width_(width), height_(height), blocked_(std::move(blocked)), name_(std::move(name)) {
    if (width_ < 1 || height_ < 1)
        throw std::runtime_error("grid map must be at least 1x1");
    if ((int)blocked_.size() != width_ * height_)
        throw std::runtime_error("blocked grid size does not match dimensions");
    passable_count_ = (int)std::count(blocked_.begin(), blocked_.end(), false);
    if (passable_count_ == 0)
        throw std::runtime_error("grid map has no passable cell");
}

void GridMap::neighbors(int v, std::vector<int>& out) const {
    out.clear();
    const int col = col_of(v);
    const int row = row_of(v);
    if (row > 0 && !blocked_[v - width_]) out.push_back(v - width_);
    if (col > 0 && !blocked_[v - 1]) out.push_back(v - 1);
    if (col + 1 < width_ && !blocked_[v + 1]) out.push_back(v + 1);
    if (row + 1 < height_ && !blocked_[v + width_]) out.push_back(v + width_);
}

std::vector<int> GridMap::neighbors(int v) const {
    std::vector<int> out;
    neighbors(v, out);
    return out;
}

bool GridMap::adjacent_or_equal(int u, int v) const {
    if (u == v) return true;
    return manhattan(u, v) == 1;
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    std::ostringstream oss;
    oss << "map parse error at line " << line_no << ": " << what;
    throw std::runtime_error(oss.str());
}

std::string next_line(std::istringstream& in, int& line_no) {
    std::string line;
    if (!std::getline(in, line)) parse_fail(line_no + 1, "unexpected end of file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

GridMap parse_map(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    int line_no = 0;

    std::string line = next_line(in, line_no);
    if (line != "type octile") parse_fail(line_no, "expected 'type octile', got '" + line + "'");

    line = next_line(in, line_no);
    int height = 0;
    if (std::sscanf(line.c_str(), "height %d", &height) != 1 || height < 1)
        parse_fail(line_no, "expected 'height H' with H >= 1");

    line = next_line(in, line_no);
    int width = 0;
    if (std::sscanf(line.c_str(), "width %d", &width) != 1 || width < 1)
        parse_fail(line_no, "expected 'width W' with W >= 1");

    line = next_line(in, line_no);
    if (line != "map") parse_fail(line_no, "expected 'map', got '" + line + "'");

    std::vector<bool> blocked((size_t)width * height, false);
    for (int row = 0; row < height; ++row) {
        line = next_line(in, line_no);
        if ((int)line.size() != width)
            parse_fail(line_no, "grid row has length " + std::to_string(line.size()) +
                                    ", expected " + std::to_string(width));
        for (int col = 0; col < width; ++col) {
            switch (line[col]) {
                case '.':
                case 'G':
                    break;
                case '@':
                case 'T':
                    blocked[(size_t)row * width + col] = true;
                    break;
                default:
                    parse_fail(line_no, std::string("unknown cell glyph '") + line[col] + "'");
            }
        }
    }
    return GridMap(width, height, std::move(blocked), name);
}

GridMap load_map_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open map file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string base = path;
    auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    return parse_map(buf.str(), base);
}

std::string write_map(const GridMap& map) {
    std::ostringstream out;
    out << "type octile\n";
    out << "height " << map.height() << "\n";
    out << "width " << map.width() << "\n";
    out << "map\n";
    for (int row = 0; row < map.height(); ++row) {
        for (int col = 0; col < map.width(); ++col)
            out << (map.passable(col, row) ? '.' : '@');
        out << "\n";
    }
    return out.str();
}

const std::vector<int>& DistanceTable::field(int source) {
    auto it = fields_.find(source);
    if (it != fields_.end()) return it->second;

    std::vector<int> dist((size_t)map_->size(), kInf);
    std::deque<int> queue;
    dist[source] = 0;
    queue.push_back(source);
    std::vector<int> nbrs;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        map_->neighbors(v, nbrs);
        for (int u : nbrs) {
            if (dist[u] == kInf) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return fields_.emplace(source, std::move(dist)).first->second;
}

int DistanceTable::distance(int u, int v) {
    if (u == v) return 0;
    // Reuse whichever endpoint is already memoized; the grid is undirected.
    auto it = fields_.find(u);
    if (it != fields_.end()) return it->second[v];
    it = fields_.find(v);
    if (it != fields_.end()) return it->second[u];
    return field(u)[v];
}

}  // namespace tapfpc

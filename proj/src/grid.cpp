#include "fastmapd/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fastmapd/errors.hpp"

namespace fmd {

std::size_t GridMap::passable_count() const
{
    return static_cast<std::size_t>(std::count(passable.begin(), passable.end(), true));
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size())
            break;
        start = end + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

int parse_dimension(std::string_view value, std::size_t line)
{
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || out <= 0)
        throw ParseError("invalid dimension '" + std::string(value) + "'", line);
    return out;
}

bool cell_passable(char c, std::size_t line)
{
    switch (c) {
    case '.':
    case 'G':
    case 'S':
        return true;
    case '@':
    case 'O':
    case 'T':
    case 'W':
        return false;
    default:
        throw ParseError(std::string("unknown cell character '") + c + "'", line);
    }
}

} // namespace

GridMap load_movingai_map(std::string_view text)
{
    const auto lines = split_lines(text);
    GridMap map;
    std::size_t i = 0;
    bool saw_type = false;
    for (;; ++i) {
        if (i >= lines.size())
            throw ParseError("unexpected end of header (missing 'map' line)", i + 1);
        const std::string_view line = trim(lines[i]);
        if (line.empty())
            continue;
        const auto space = line.find_first_of(" \t");
        const std::string_view key = line.substr(0, space);
        const std::string_view value = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
        if (key == "type") {
            saw_type = true;
        } else if (key == "height") {
            map.height = parse_dimension(value, i + 1);
        } else if (key == "width") {
            map.width = parse_dimension(value, i + 1);
        } else if (key == "map" && value.empty()) {
            break;
        } else {
            throw ParseError("malformed header line '" + std::string(line) + "'", i + 1);
        }
    }
    if (!saw_type || map.height == 0 || map.width == 0)
        throw ParseError("header must declare type, height and width before 'map'", i + 1);

    map.passable.assign(static_cast<std::size_t>(map.width) * map.height, false);
    const std::size_t first_row = i + 1;
    for (int y = 0; y < map.height; ++y) {
        const std::size_t idx = first_row + static_cast<std::size_t>(y);
        const std::size_t line_no = idx + 1;
        if (idx >= lines.size() || (lines[idx].empty() && idx + 1 >= lines.size()))
            throw ParseError("expected " + std::to_string(map.height) + " map rows, missing row "
                                 + std::to_string(y + 1),
                             line_no);
        const std::string_view row = lines[idx];
        if (row.size() != static_cast<std::size_t>(map.width))
            throw ParseError("row " + std::to_string(y + 1) + " has length " + std::to_string(row.size())
                                 + ", expected " + std::to_string(map.width),
                             line_no);
        for (int x = 0; x < map.width; ++x)
            map.passable[static_cast<std::size_t>(y) * map.width + x] = cell_passable(row[x], line_no);
    }
    for (std::size_t extra = first_row + map.height; extra < lines.size(); ++extra)
        if (!trim(lines[extra]).empty())
            throw ParseError("unexpected content after the last map row", extra + 1);
    return map;
}

GridMap load_movingai_map_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::ios_base::failure("cannot open map file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_movingai_map(buffer.str());
}

std::string to_movingai_text(const GridMap& map)
{
    std::string out = "type octile\nheight " + std::to_string(map.height) + "\nwidth " + std::to_string(map.width)
                      + "\nmap\n";
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x)
            out += map.is_passable(x, y) ? '.' : '@';
        out += '\n';
    }
    return out;
}

double height(HeightFunction h, int x, int y)
{
    const double xd = x;
    const double yd = y;
    switch (h) {
    case HeightFunction::Polynomial:
        return xd + yd * yd + (xd + yd) * (xd + yd) * (xd + yd);
    case HeightFunction::Exponential:
        return std::pow(1.01, xd) + std::pow(1.02, yd) + std::pow(1.03, xd + yd);
    }
    return 0.0;
}

GridGraph grid_to_directed_graph(const GridMap& map, HeightFunction h, Connectivity connectivity)
{
    GridGraph out;
    out.width = map.width;
    out.height = map.height;
    out.connectivity = connectivity;
    out.vertex_of.assign(map.passable.size(), -1);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x)
            if (map.is_passable(x, y)) {
                out.vertex_of[static_cast<std::size_t>(y) * map.width + x] = static_cast<std::int64_t>(out.cells.size());
                out.cells.push_back({x, y});
            }
    if (out.cells.empty())
        throw std::invalid_argument("map has no passable cell");

    std::vector<double> heights(out.cells.size());
    for (std::size_t v = 0; v < out.cells.size(); ++v)
        heights[v] = height(h, out.cells[v].x, out.cells[v].y);

    // Forward half-neighborhood so that each unordered pair is visited once.
    struct Offset {
        int dx, dy;
        bool diagonal;
    };
    std::vector<Offset> offsets{{1, 0, false}, {0, 1, false}};
    if (connectivity == Connectivity::Eight) {
        offsets.push_back({1, 1, true});
        offsets.push_back({-1, 1, true});
    }

    std::vector<Edge> edges;
    for (std::size_t v = 0; v < out.cells.size(); ++v) {
        const auto [x, y] = out.cells[v];
        for (const auto& o : offsets) {
            const int nx = x + o.dx;
            const int ny = y + o.dy;
            if (nx < 0 || ny < 0 || nx >= map.width || ny >= map.height || !map.is_passable(nx, ny))
                continue;
            // No corner cutting: both orthogonal cells must be open for a diagonal move.
            if (o.diagonal && (!map.is_passable(nx, y) || !map.is_passable(x, ny)))
                continue;
            const auto u = static_cast<VertexId>(v);
            const auto w = static_cast<VertexId>(out.vertex_of[static_cast<std::size_t>(ny) * map.width + nx]);
            edges.push_back({u, w, uphill_weight(heights[u], heights[w])});
            edges.push_back({w, u, uphill_weight(heights[w], heights[u])});
        }
    }
    out.graph = DirectedGraph(out.cells.size(), std::move(edges));
    return out;
}

GridMap keep_largest_region(const GridMap& map, Connectivity connectivity)
{
    const std::size_t n = map.passable.size();
    std::vector<int> label(n, -1);
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (!map.passable[start] || label[start] >= 0)
            continue;
        const int id = static_cast<int>(sizes.size());
        sizes.push_back(0);
        label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            ++sizes[id];
            const int x = static_cast<int>(c % map.width);
            const int y = static_cast<int>(c / map.width);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const bool diagonal = dx != 0 && dy != 0;
                    if ((dx == 0 && dy == 0) || (diagonal && connectivity == Connectivity::Four))
                        continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= map.width || ny >= map.height)
                        continue;
                    if (diagonal && (!map.is_passable(nx, y) || !map.is_passable(x, ny)))
                        continue;
                    const std::size_t nc = static_cast<std::size_t>(ny) * map.width + nx;
                    if (map.passable[nc] && label[nc] < 0) {
                        label[nc] = id;
                        stack.push_back(nc);
                    }
                }
        }
    }
    GridMap out = map;
    if (sizes.empty())
        return out;
    const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t c = 0; c < n; ++c)
        out.passable[c] = map.passable[c] && label[c] == best;
    return out;
}

GridMap random_obstacle_map(int width, int height, double obstacle_density, std::uint64_t seed)
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("map dimensions must be positive");
    if (!(obstacle_density >= 0.0 && obstacle_density < 1.0))
        throw std::invalid_argument("obstacle density must be in [0, 1)");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution blocked(obstacle_density);
    GridMap map;
    map.width = width;
    map.height = height;
    map.passable.resize(static_cast<std::size_t>(width) * height);
    for (std::size_t c = 0; c < map.passable.size(); ++c)
        map.passable[c] = !blocked(rng);
    return keep_largest_region(map);
}

HeightFunction parse_height_function(std::string_view name)
{
    if (name == "poly" || name == "polynomial")
        return HeightFunction::Polynomial;
    if (name == "exp" || name == "exponential")
        return HeightFunction::Exponential;
    throw std::invalid_argument("unknown height function '" + std::string(name) + "' (expected poly or exp)");
}

std::string_view to_string(HeightFunction h)
{
    return h == HeightFunction::Polynomial ? "poly" : "exp";
}

} // namespace fmd

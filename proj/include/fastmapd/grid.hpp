#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fastmapd/graph.hpp"

namespace fmd {

enum class Connectivity { Four = 4, Eight = 8 };

/// Passable/blocked occupancy grid, row-major with y growing downwards.
struct GridMap {
    int width = 0;
    int height = 0;
    std::vector<bool> passable;

    bool is_passable(int x, int y) const { return passable[static_cast<std::size_t>(y) * width + x]; }
    std::size_t passable_count() const;
};

/// Parses MovingAI `.map` text: `type`, `height H`, `width W`, `map`, then H rows.
/// `.`, `G`, `S` are passable; `@`, `O`, `T`, `W` are blocked. Errors name the
/// offending line.
GridMap load_movingai_map(std::string_view text);
GridMap load_movingai_map_file(const std::string& path);
std::string to_movingai_text(const GridMap& map);

/// Synthetic terrain used to derive asymmetric edge weights from a grid.
enum class HeightFunction { Polynomial, Exponential };

/// h(x, y) = x + y^2 + (x + y)^3 for Polynomial,
/// h(x, y) = 1.01^x + 1.02^y + 1.03^(x + y) for Exponential.
double height(HeightFunction h, int x, int y);

/// Going uphill by dh costs 2 dh, going downhill by dh costs dh / 2.
inline double uphill_weight(double h_from, double h_to)
{
    return h_to >= h_from ? 2.0 * (h_to - h_from) : (h_from - h_to) / 2.0;
}

struct Cell {
    int x;
    int y;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridGraph {
    DirectedGraph graph;
    std::vector<Cell> cells;           ///< vertex -> cell
    std::vector<std::int64_t> vertex_of; ///< cell (row-major) -> vertex, -1 if blocked
    int width = 0;
    int height = 0;
    Connectivity connectivity = Connectivity::Four;
};

/// One vertex per passable cell (row-major numbering) and two opposite directed
/// edges per adjacent passable pair. Throws std::invalid_argument when the map has
/// no passable cell.
GridGraph grid_to_directed_graph(const GridMap& map, HeightFunction h,
                                 Connectivity connectivity = Connectivity::Four);

/// Uniform random obstacles with the given density, then everything outside the
/// largest 4-connected passable region is blocked.
GridMap random_obstacle_map(int width, int height, double obstacle_density, std::uint64_t seed);

/// Blocks every passable cell outside the largest connected region.
GridMap keep_largest_region(const GridMap& map, Connectivity connectivity = Connectivity::Four);

HeightFunction parse_height_function(std::string_view name);
std::string_view to_string(HeightFunction h);

} // namespace fmd

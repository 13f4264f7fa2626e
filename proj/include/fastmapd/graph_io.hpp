#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fastmapd/graph.hpp"
#include "fastmapd/grid.hpp"

namespace fmd {

// Edge-list interchange:
//   #vertices N
//   src<TAB>dst<TAB>weight
// Weights are written with round-trip precision.

DirectedGraph read_graph_tsv(std::string_view text);
DirectedGraph read_graph_tsv_file(const std::string& path);
void write_graph_tsv(std::ostream& out, const DirectedGraph& g);

// Vertex <-> cell mapping written next to synthesized graphs:
//   #grid W H connectivity
//   vertex<TAB>x<TAB>y

struct CellMapping {
    int width = 0;
    int height = 0;
    Connectivity connectivity = Connectivity::Four;
    std::vector<Cell> cells;
};

void write_cells_tsv(std::ostream& out, const GridGraph& grid);
CellMapping read_cells_tsv(std::string_view text);
CellMapping read_cells_tsv_file(const std::string& path);

std::string read_text_file(const std::string& path);

} // namespace fmd

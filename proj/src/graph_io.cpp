#include "fastmapd/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "fastmapd/errors.hpp"

namespace fmd {

namespace {

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(std::string("invalid ") + what + " '" + std::string(token) + "'", line);
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

/// Calls fn(line_number, line) for each non-empty line, with '\r' stripped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        ++line_no;
        if (!line.empty())
            fn(line_no, line);
        start = end + 1;
    }
}

} // namespace

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

DirectedGraph read_graph_tsv(std::string_view text)
{
    std::size_t vertices = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!have_header) {
            constexpr std::string_view prefix = "#vertices ";
            if (!line.starts_with(prefix))
                throw ParseError("expected '#vertices N' header", line_no);
            vertices = parse_number<std::size_t>(line.substr(prefix.size()), line_no, "vertex count");
            have_header = true;
            return;
        }
        if (line.front() == '#')
            return;
        const auto fields = split(line, '\t');
        if (fields.size() != 3)
            throw ParseError("expected src<TAB>dst<TAB>weight", line_no);
        const auto src = parse_number<std::uint64_t>(fields[0], line_no, "source");
        const auto dst = parse_number<std::uint64_t>(fields[1], line_no, "target");
        const auto w = parse_number<double>(fields[2], line_no, "weight");
        if (src >= vertices || dst >= vertices)
            throw ParseError("vertex id out of range", line_no);
        if (!(w >= 0.0) || w == std::numeric_limits<double>::infinity())
            throw ParseError("weight must be finite and non-negative", line_no);
        edges.push_back({static_cast<VertexId>(src), static_cast<VertexId>(dst), w});
    });
    if (!have_header)
        throw ParseError("empty graph file (missing '#vertices N' header)", 1);
    if (vertices == 0)
        throw ParseError("graph must have at least one vertex", 1);
    return DirectedGraph(vertices, std::move(edges));
}

DirectedGraph read_graph_tsv_file(const std::string& path)
{
    return read_graph_tsv(read_text_file(path));
}

void write_graph_tsv(std::ostream& out, const DirectedGraph& g)
{
    out << "#vertices " << g.vertex_count() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const Edge& e : g.edges())
        out << e.source << '\t' << e.target << '\t' << e.weight << '\n';
}

void write_cells_tsv(std::ostream& out, const GridGraph& grid)
{
    out << "#grid " << grid.width << ' ' << grid.height << ' ' << static_cast<int>(grid.connectivity) << '\n';
    for (std::size_t v = 0; v < grid.cells.size(); ++v)
        out << v << '\t' << grid.cells[v].x << '\t' << grid.cells[v].y << '\n';
}

CellMapping read_cells_tsv(std::string_view text)
{
    CellMapping mapping;
    bool have_header = false;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!have_header) {
            const auto fields = split(line, ' ');
            if (fields.size() != 4 || fields[0] != "#grid")
                throw ParseError("expected '#grid W H connectivity' header", line_no);
            mapping.width = parse_number<int>(fields[1], line_no, "width");
            mapping.height = parse_number<int>(fields[2], line_no, "height");
            const int c = parse_number<int>(fields[3], line_no, "connectivity");
            if (c != 4 && c != 8)
                throw ParseError("connectivity must be 4 or 8", line_no);
            mapping.connectivity = static_cast<Connectivity>(c);
            have_header = true;
            return;
        }
        const auto fields = split(line, '\t');
        if (fields.size() != 3)
            throw ParseError("expected vertex<TAB>x<TAB>y", line_no);
        const auto v = parse_number<std::size_t>(fields[0], line_no, "vertex");
        if (v != mapping.cells.size())
            throw ParseError("vertices must be listed in order", line_no);
        mapping.cells.push_back({parse_number<int>(fields[1], line_no, "x"), parse_number<int>(fields[2], line_no, "y")});
    });
    if (!have_header)
        throw ParseError("empty cell mapping", 1);
    return mapping;
}

CellMapping read_cells_tsv_file(const std::string& path)
{
    return read_cells_tsv(read_text_file(path));
}

} // namespace fmd

#include "fastmapd/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmd {

DirectedGraph::DirectedGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : edges_(std::move(edges)), offsets_(vertex_count + 1, 0)
{
    for (const Edge& e : edges_) {
        if (e.source >= vertex_count || e.target >= vertex_count)
            throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.source) + " -> "
                                        + std::to_string(e.target));
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("edge weight must be finite and non-negative");
        ++offsets_[e.source + 1];
    }
    for (std::size_t v = 0; v < vertex_count; ++v)
        offsets_[v + 1] += offsets_[v];

    arcs_.resize(edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_)
        arcs_[cursor[e.source]++] = Arc{e.target, e.weight};
}

DirectedGraph reverse_graph(const DirectedGraph& g)
{
    std::vector<Edge> reversed;
    reversed.reserve(g.edge_count());
    for (const Edge& e : g.edges())
        reversed.push_back({e.target, e.source, e.weight});
    return DirectedGraph(g.vertex_count(), std::move(reversed));
}

namespace {

std::vector<char> reachable_from_zero(const DirectedGraph& g)
{
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const VertexId u = stack.back();
        stack.pop_back();
        for (const auto& arc : g.out_arcs(u)) {
            if (!seen[arc.target]) {
                seen[arc.target] = 1;
                stack.push_back(arc.target);
            }
        }
    }
    return seen;
}

} // namespace

std::size_t first_disconnected_vertex(const DirectedGraph& g)
{
    const std::size_t n = g.vertex_count();
    if (n == 0)
        return 0;
    const auto forward = reachable_from_zero(g);
    const auto backward = reachable_from_zero(reverse_graph(g));
    for (std::size_t v = 0; v < n; ++v)
        if (!forward[v] || !backward[v])
            return v;
    return n;
}

bool is_strongly_connected(const DirectedGraph& g)
{
    return g.vertex_count() > 0 && first_disconnected_vertex(g) == g.vertex_count();
}

} // namespace fmd

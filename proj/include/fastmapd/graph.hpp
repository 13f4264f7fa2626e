#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fmd {

using VertexId = std::uint32_t;

struct Edge {
    VertexId source;
    VertexId target;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted directed graph in compressed sparse row form. Immutable after
/// construction; out-neighbors of a vertex are a contiguous span.
class DirectedGraph {
public:
    struct Arc {
        VertexId target;
        double weight;
    };

    DirectedGraph() = default;

    /// Throws std::invalid_argument on out-of-range endpoints or on negative or
    /// non-finite weights.
    DirectedGraph(std::size_t vertex_count, std::vector<Edge> edges);

    std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Edges in insertion order.
    std::span<const Edge> edges() const noexcept { return edges_; }

    std::span<const Arc> out_arcs(VertexId v) const noexcept
    {
        return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Arc> arcs_;
};

/// Same vertex set, every edge (u, v, w) replaced by (v, u, w).
DirectedGraph reverse_graph(const DirectedGraph& g);

/// True iff every vertex reaches every other vertex. Uses one forward and one
/// backward reachability sweep from vertex 0.
bool is_strongly_connected(const DirectedGraph& g);

/// First vertex not mutually reachable with vertex 0, or vertex_count() when the
/// graph is strongly connected.
std::size_t first_disconnected_vertex(const DirectedGraph& g);

} // namespace fmd

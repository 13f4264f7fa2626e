#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fastmapd/graph.hpp"

namespace fmd::testing {

// Random strongly connected digraph: a Hamiltonian cycle over a shuffled order plus
// extra random arcs. Weights are uniform in [0, max_weight].
inline DirectedGraph random_strong_graph(std::size_t n, std::uint64_t seed, double max_weight = 10.0,
                                         double extra_per_vertex = 2.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> weight(0.0, max_weight);
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        edges.push_back({order[i], order[(i + 1) % n], weight(rng)});
    std::uniform_int_distribution<VertexId> vertex(0, static_cast<VertexId>(n - 1));
    const auto extra = static_cast<std::size_t>(extra_per_vertex * static_cast<double>(n));
    for (std::size_t e = 0; e < extra; ++e) {
        const VertexId u = vertex(rng);
        const VertexId v = vertex(rng);
        if (u != v)
            edges.push_back({u, v, weight(rng)});
    }
    return DirectedGraph(n, std::move(edges));
}

// Undirected graph expressed as paired arcs with equal weights.
inline DirectedGraph symmetric_graph(std::size_t n, const std::vector<Edge>& undirected)
{
    std::vector<Edge> edges;
    for (const auto& e : undirected) {
        edges.push_back(e);
        edges.push_back({e.target, e.source, e.weight});
    }
    return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph two_cycle() { return DirectedGraph(2, {{0, 1, 1.0}, {1, 0, 3.0}}); }

} // namespace fmd::testing

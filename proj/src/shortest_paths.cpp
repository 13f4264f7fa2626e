#include "fastmapd/shortest_paths.hpp"

#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fastmapd/errors.hpp"

namespace fmd {

DistanceVector sssp(const DirectedGraph& g, VertexId root)
{
    const std::size_t n = g.vertex_count();
    if (root >= n)
        throw std::out_of_range("root " + std::to_string(root) + " is not a vertex");

    DistanceVector out;
    out.root = root;
    out.dist = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), kUnreachable);
    out.dist[root] = 0.0;

    using Entry = std::pair<double, VertexId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, root);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > out.dist[u])
            continue; // stale
        for (const auto& arc : g.out_arcs(u)) {
            const double candidate = d + arc.weight;
            if (candidate < out.dist[arc.target]) {
                out.dist[arc.target] = candidate;
                heap.emplace(candidate, arc.target);
            }
        }
    }
    return out;
}

Eigen::VectorXd average_distance(const DirectedGraph& g, const DirectedGraph& reversed, VertexId root,
                                 Eigen::VectorXd& forward)
{
    forward = sssp(g, root).dist;
    const Eigen::VectorXd backward = sssp(reversed, root).dist;
    for (Eigen::Index v = 0; v < forward.size(); ++v)
        if (!is_reachable(forward[v]) || !is_reachable(backward[v]))
            throw ConnectivityError("graph not strongly connected: vertex " + std::to_string(v)
                                        + " is not mutually reachable with vertex " + std::to_string(root),
                                    static_cast<std::size_t>(v));
    return (forward + backward) / 2.0;
}

Eigen::VectorXd average_distance(const DirectedGraph& g, const DirectedGraph& reversed, VertexId root)
{
    Eigen::VectorXd forward;
    return average_distance(g, reversed, root, forward);
}

Eigen::VectorXd average_distance(const DirectedGraph& g, VertexId root)
{
    return average_distance(g, reverse_graph(g), root);
}

Eigen::MatrixXd all_pairs_oracle(const DirectedGraph& g, std::size_t cap)
{
    const std::size_t n = g.vertex_count();
    if (n > cap)
        throw std::length_error("all-pairs oracle limited to " + std::to_string(cap) + " vertices, graph has "
                                + std::to_string(n));
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(size, size, kUnreachable);
    for (Eigen::Index v = 0; v < size; ++v)
        d(v, v) = 0.0;
    for (const Edge& e : g.edges())
        if (e.source != e.target)
            d(e.source, e.target) = std::min(d(e.source, e.target), e.weight);
    for (Eigen::Index k = 0; k < size; ++k)
        for (Eigen::Index i = 0; i < size; ++i) {
            const double dik = d(i, k);
            if (!is_reachable(dik))
                continue;
            for (Eigen::Index j = 0; j < size; ++j)
                if (dik + d(k, j) < d(i, j))
                    d(i, j) = dik + d(k, j);
        }
    return d;
}

} // namespace fmd

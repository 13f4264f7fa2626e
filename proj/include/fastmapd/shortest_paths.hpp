#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Core>

#include "fastmapd/graph.hpp"

namespace fmd {

/// Marker for vertices that cannot be reached from the root.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_reachable(double distance) noexcept { return distance != kUnreachable; }

struct DistanceVector {
    VertexId root = 0;
    Eigen::VectorXd dist; ///< dist[v] = d_G(root, v), kUnreachable if no path
};

/// Dijkstra with a binary heap and lazy deletion. Throws std::out_of_range for
/// an invalid root.
DistanceVector sssp(const DirectedGraph& g, VertexId root);

/// Symmetrized distances (d_G(root, v) + d_G(v, root)) / 2 for every v, using
/// one tree on g and one on its reverse. Throws ConnectivityError naming the
/// first vertex with an infinite distance.
Eigen::VectorXd average_distance(const DirectedGraph& g, const DirectedGraph& reversed, VertexId root);
Eigen::VectorXd average_distance(const DirectedGraph& g, VertexId root);

/// Same, but also hands back the forward distances d_G(root, .).
Eigen::VectorXd average_distance(const DirectedGraph& g, const DirectedGraph& reversed, VertexId root,
                                 Eigen::VectorXd& forward);

inline constexpr std::size_t kDefaultOracleCap = 512;

/// Floyd-Warshall all-pairs distances, row = source. Test oracle only; throws
/// std::length_error above `cap` vertices.
Eigen::MatrixXd all_pairs_oracle(const DirectedGraph& g, std::size_t cap = kDefaultOracleCap);

} // namespace fmd

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "fastmapd/graph.hpp"

namespace fmd {

struct EmbedConfig {
    int k_max = 16;          ///< upper bound on total dimensionality (Euclidean + potential)
    double epsilon = 1e-4;   ///< threshold on the squared residual d'_ab
    int pivot_iters = 10;    ///< farthest-pair refinement rounds
    std::uint64_t seed = 0;
    bool enhancements = true; ///< clamping, random pivot reassignment, d'_ab = 1 fallback

    void validate() const;
};

struct PivotPair {
    VertexId a;
    VertexId b;
    friend bool operator==(const PivotPair&, const PivotPair&) = default;
};

struct EmbedStats {
    std::size_t average_distance_calls = 0;
    std::size_t clamped_residuals = 0; ///< residuals raised to 0 by clamping
    std::size_t reassignments = 0;     ///< random pivot reassignments
    std::size_t fallbacks = 0;         ///< iterations that used d'_ab = 1
};

/// Per-vertex coordinates: columns [0, k) are Euclidean, column k is the
/// potential (0 until a potential model is assigned).
struct Embedding {
    int k = 0;
    Eigen::MatrixXd coords;
    std::vector<PivotPair> pivots;
    EmbedConfig config;
    EmbedStats stats;

    Eigen::Index vertex_count() const { return coords.rows(); }
    auto euclidean() const { return coords.leftCols(k); }
    auto potential() const { return coords.col(k); }
    auto potential() { return coords.col(k); }
};

/// Squared residual distance d^2 - sum_{c < prior} (p_j[c] - p_i[c])^2 after
/// `prior` coordinates are known; clamped at 0 when `clamp` is set.
template <typename DerivedI, typename DerivedJ>
typename DerivedI::Scalar residual_sq(typename DerivedI::Scalar d, const Eigen::MatrixBase<DerivedI>& p_i,
                                      const Eigen::MatrixBase<DerivedJ>& p_j, Eigen::Index prior, bool clamp)
{
    using Scalar = typename DerivedI::Scalar;
    Scalar explained(0);
    for (Eigen::Index c = 0; c < prior; ++c) {
        const Scalar diff = p_j(c) - p_i(c);
        explained += diff * diff;
    }
    const Scalar raw = d * d - explained;
    return clamp && raw < Scalar(0) ? Scalar(0) : raw;
}

/// Average-distance provider for the embedder: holds the reversed graph once,
/// counts tree computations and memoizes the most recent roots.
class AverageDistances {
public:
    explicit AverageDistances(const DirectedGraph& g);
    explicit AverageDistances(DirectedGraph&&) = delete;

    const Eigen::VectorXd& from(VertexId root);
    std::size_t calls() const noexcept { return calls_; }
    const DirectedGraph& graph() const noexcept { return g_; }
    const DirectedGraph& reversed() const noexcept { return reversed_; }

private:
    struct Slot {
        VertexId root;
        Eigen::VectorXd dist;
        std::uint64_t stamp;
    };
    const DirectedGraph& g_;
    DirectedGraph reversed_;
    std::array<Slot, 3> cache_{};
    std::uint64_t clock_ = 0;
    std::size_t calls_ = 0;
};

/// Partial embedding with room for cfg.k_max - 1 Euclidean columns.
Embedding start_embedding(std::size_t vertex_count, const EmbedConfig& cfg);

/// Heuristic farthest pair for the next column (emb.k columns already known).
/// Alternates from a random start for at most cfg.pivot_iters rounds; ties go to
/// the lowest vertex id. With enhancements, a pair whose residual falls below
/// epsilon triggers a random reassignment (at most |V| times in total, then the
/// best pair seen is kept).
PivotPair choose_farthest_pair(AverageDistances& distances, Embedding& emb, const EmbedConfig& cfg,
                               std::mt19937_64& rng);

/// Fills column emb.k by the cosine-law projection onto the pivot line and
/// appends the pivot pair. Returns false, leaving emb untouched, when
/// d'_ab < epsilon and enhancements are off.
bool compute_coordinate_column(AverageDistances& distances, Embedding& emb, PivotPair pivots, const EmbedConfig& cfg);

/// Phase one: embeds average distances into up to k_max - 1 Euclidean columns.
/// The returned coords carry one extra zero column for the potential.
Embedding embed_average_distances(const DirectedGraph& g, const EmbedConfig& cfg);

} // namespace fmd

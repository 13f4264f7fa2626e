#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fastmapd/embedder.hpp"
#include "fastmapd/graph.hpp"
#include "fastmapd/grid.hpp"
#include "fastmapd/nn.hpp"
#include "fastmapd/potential.hpp"

namespace fmd {

/// ||p_j - p_i||_odot: Euclidean distance over all but the last entry plus the
/// signed difference of the last entries. May be negative.
template <typename DerivedI, typename DerivedJ>
typename DerivedI::Scalar odot_distance(const Eigen::MatrixBase<DerivedI>& p_i, const Eigen::MatrixBase<DerivedJ>& p_j)
{
    if (p_i.size() != p_j.size() || p_i.size() < 2)
        throw std::invalid_argument("odot_distance needs two points of equal length >= 2");
    const Eigen::Index k = p_i.size() - 1;
    using std::sqrt;
    typename DerivedI::Scalar squared(0);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto diff = p_j(c) - p_i(c);
        squared += diff * diff;
    }
    return sqrt(squared) + (p_j(k) - p_i(k));
}

struct DistanceSample {
    VertexId source;
    VertexId target;
    double distance; ///< true d_G(source, target)
};

struct SamplingOptions {
    std::size_t pairs = 100000;      ///< N; all ordered pairs are used when N >= |V|(|V| - 1)
    std::size_t source_pool = 1000;  ///< distinct sources to draw from; 0 = unrestricted
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// Seeded sample of ordered pairs i != j with exact directed distances. Each
/// sample picks its source uniformly from a random pool of sources (or from all
/// vertices) and its target uniformly among the others; one tree per source.
std::vector<DistanceSample> sample_distances(const DirectedGraph& g, const SamplingOptions& opts);

/// sigma / mean(d) with sigma = sqrt(mean((d - estimate)^2)). Throws
/// NumericError when the mean true distance is 0.
double nrmse(const std::vector<DistanceSample>& samples, const std::function<double(VertexId, VertexId)>& estimate);

/// NRMSE of the odot distance of `emb` against the sampled true distances.
double nrmse(const std::vector<DistanceSample>& samples, const Embedding& emb);
double nrmse(const DirectedGraph& g, const Embedding& emb, std::size_t n, std::uint64_t seed);

enum class Method { FastMap, FastMapDLasso, FastMapDNn, DirectNn };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct EvalReport {
    std::string map;
    std::string heights;
    Method method = Method::FastMap;
    int k = 0; ///< total dimensionality
    int degree = 0;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    double nrmse = 0.0;
    double embed_ms = 0.0;
    double fit_ms = 0.0;
    double eval_ms = 0.0;
};

struct SweepConfig {
    std::string map_id = "graph";
    std::string heights = "-";
    std::vector<int> dimensions{4, 8, 16};
    std::vector<int> degrees{2};
    std::vector<std::uint64_t> seeds{1};
    std::vector<Method> methods{Method::FastMap, Method::FastMapDLasso};
    std::size_t eval_pairs = 100000;
    std::size_t source_pool = 1000;
    double epsilon = 1e-4;
    int pivot_iters = 10;
    double lambda = 1e-3;
    std::vector<int> nn_hidden{1000, 500};
    std::vector<int> direct_nn_hidden{1000, 500, 200, 200};
    NnTrainConfig nn_train{};
    NnMode nn_mode = NnMode::PairEmbedding;
    unsigned jobs = 1;
};

/// One report per (method, K, D, seed). K is the total dimensionality: FastMap-D
/// uses K - 1 Euclidean columns plus the potential; the FastMap baseline uses K
/// Euclidean columns and no potential. Methods without a polynomial report D = 0.
/// DirectNn needs `cells`. Reports are sorted by (method, K, D, seed).
std::vector<EvalReport> sweep(const DirectedGraph& g, const SweepConfig& cfg, const std::vector<Cell>* cells = nullptr);

inline constexpr std::string_view kReportHeader = "map,heights,method,K,D,seed,N,nrmse,embed_ms,fit_ms,eval_ms";

void write_reports_csv(std::ostream& out, const std::vector<EvalReport>& reports);

} // namespace fmd

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "fastmapd/embedder.hpp"
#include "fastmapd/graph.hpp"
#include "fastmapd/lasso.hpp"
#include "fastmapd/monomials.hpp"

namespace fmd {

/// psi(x) = sum_r c_r prod_i x_i^{e_ri}, a degree-D polynomial over the k
/// Euclidean coordinates.
struct PolynomialModel {
    int k = 0;
    int degree = 0;
    ExponentTable exponents;
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    nlohmann::json training; ///< free-form fit statistics carried into the model file

    static PolynomialModel zero(int k, int degree);

    Eigen::Index size() const { return exponents.rows(); }

    template <typename Derived>
    double operator()(const Eigen::MatrixBase<Derived>& x) const
    {
        return evaluate_monomials(exponents, x).dot(coefficients);
    }
};

struct SamplingPlan {
    std::vector<VertexId> s1;
    std::vector<VertexId> s2;
    std::uint64_t seed = 0;
    std::size_t min_samples = 0;

    std::size_t sample_count() const { return s1.size() * s2.size(); }
};

/// S1 = distinct pivot vertices (first-seen order); S2 = uniform sample without
/// replacement of ceil(max(M, min_samples) / |S1|) vertices, capped at |V|.
/// min_samples = 0 selects the default 10 M. Throws std::invalid_argument when
/// |S1||S2| >= M cannot be met.
SamplingPlan build_sampling_plan(const Embedding& emb, std::size_t vertex_count, std::size_t monomials,
                                 std::uint64_t seed, std::size_t min_samples = 0);

struct TrainingSet {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<std::pair<VertexId, VertexId>> pairs; ///< row -> (v_i in S1, v_j in S2)
};

/// Row s for (v_i, v_j): A_s = m(p_j) - m(p_i), b_s = d_G(v_i, v_j) - avg_G(v_i, v_j).
/// Needs one forward and one reverse tree per member of S1.
TrainingSet build_training_set(const SamplingPlan& plan, const Embedding& emb, const ExponentTable& exponents,
                               const DirectedGraph& g, unsigned jobs = 1);

/// Writes psi(first k coordinates) into the potential column of every vertex.
/// Throws std::invalid_argument when the model arity differs from emb.k.
void assign_last_coordinate(Embedding& emb, const PolynomialModel& model);

struct PotentialFitConfig {
    int degree = 2;
    double lambda = 1e-3;      ///< applied after scaling every column to unit RMS
    std::size_t min_samples = 0;
    std::uint64_t seed = 0;
    LassoOptions lasso{1e-9, 20000, false};
    unsigned jobs = 1;
};

/// Phase two end to end: sampling plan, training set, column standardization,
/// LASSO, and coefficients mapped back to the raw monomial scale.
PolynomialModel fit_potential(const DirectedGraph& g, const Embedding& emb, const PotentialFitConfig& cfg);

nlohmann::json to_json(const PolynomialModel& model);
PolynomialModel polynomial_model_from_json(const nlohmann::json& j);

} // namespace fmd

#include "fastmapd/potential.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "fastmapd/errors.hpp"
#include "fastmapd/parallel.hpp"
#include "fastmapd/shortest_paths.hpp"

namespace fmd {

PolynomialModel PolynomialModel::zero(int k, int degree)
{
    PolynomialModel model;
    model.k = k;
    model.degree = degree;
    model.exponents = enumerate_monomials(k, degree);
    model.coefficients = Eigen::VectorXd::Zero(model.exponents.rows());
    return model;
}

SamplingPlan build_sampling_plan(const Embedding& emb, std::size_t vertex_count, std::size_t monomials,
                                 std::uint64_t seed, std::size_t min_samples)
{
    if (emb.pivots.empty())
        throw std::invalid_argument("sampling plan needs at least one pivot pair");
    SamplingPlan plan;
    plan.seed = seed;
    std::unordered_set<VertexId> seen;
    for (const auto& p : emb.pivots)
        for (VertexId v : {p.a, p.b})
            if (seen.insert(v).second)
                plan.s1.push_back(v);

    plan.min_samples = min_samples == 0 ? 10 * monomials : min_samples;
    const std::size_t wanted = std::max(monomials, plan.min_samples);
    const std::size_t s2_size = std::min(vertex_count, (wanted + plan.s1.size() - 1) / plan.s1.size());
    if (plan.s1.size() * s2_size < monomials)
        throw std::invalid_argument("graph too small for " + std::to_string(monomials) + " monomials: at most "
                                    + std::to_string(plan.s1.size() * s2_size)
                                    + " training samples available; use a smaller degree");

    std::vector<VertexId> all(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v)
        all[v] = static_cast<VertexId>(v);
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first s2_size entries become the sample.
    for (std::size_t i = 0; i < s2_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, vertex_count - 1);
        std::swap(all[i], all[pick(rng)]);
    }
    plan.s2.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s2_size));
    return plan;
}

TrainingSet build_training_set(const SamplingPlan& plan, const Embedding& emb, const ExponentTable& exponents,
                               const DirectedGraph& g, unsigned jobs)
{
    if (plan.s1.empty() || plan.s2.empty())
        throw std::invalid_argument("sampling plan has an empty set");
    if (exponents.cols() != emb.k)
        throw std::invalid_argument("monomial arity does not match the embedding dimensionality");

    const auto m = exponents.rows();
    const auto s2_size = static_cast<Eigen::Index>(plan.s2.size());
    const auto x = emb.euclidean();

    Eigen::MatrixXd target_terms(s2_size, m);
    for (Eigen::Index j = 0; j < s2_size; ++j)
        target_terms.row(j) = evaluate_monomials(exponents, x.row(plan.s2[j]).transpose()).transpose();

    TrainingSet ts;
    ts.A.resize(static_cast<Eigen::Index>(plan.sample_count()), m);
    ts.b.resize(ts.A.rows());
    ts.pairs.resize(plan.sample_count());

    const DirectedGraph reversed = reverse_graph(g);
    parallel_for(plan.s1.size(), jobs, [&](std::size_t si) {
        const VertexId vi = plan.s1[si];
        Eigen::VectorXd forward;
        const Eigen::VectorXd avg = average_distance(g, reversed, vi, forward);
        const Eigen::RowVectorXd source_terms = evaluate_monomials(exponents, x.row(vi).transpose()).transpose();
        const auto base = static_cast<Eigen::Index>(si) * s2_size;
        for (Eigen::Index j = 0; j < s2_size; ++j) {
            const VertexId vj = plan.s2[j];
            ts.A.row(base + j) = target_terms.row(j) - source_terms;
            ts.b[base + j] = forward[vj] - avg[vj];
            ts.pairs[base + j] = {vi, vj};
        }
    });
    return ts;
}

void assign_last_coordinate(Embedding& emb, const PolynomialModel& model)
{
    if (model.k != emb.k)
        throw std::invalid_argument("potential model arity " + std::to_string(model.k)
                                    + " does not match embedding dimensionality " + std::to_string(emb.k));
    for (Eigen::Index v = 0; v < emb.coords.rows(); ++v)
        emb.coords(v, emb.k) = model(emb.coords.row(v).head(emb.k).transpose());
}

PolynomialModel fit_potential(const DirectedGraph& g, const Embedding& emb, const PotentialFitConfig& cfg)
{
    if (emb.k < 1)
        throw std::invalid_argument("embedding has no Euclidean coordinates");
    if (!(cfg.lambda >= 0.0))
        throw std::invalid_argument("lambda must be non-negative");
    PolynomialModel model = PolynomialModel::zero(emb.k, cfg.degree);
    model.lambda = cfg.lambda;

    const SamplingPlan plan = build_sampling_plan(emb, g.vertex_count(), static_cast<std::size_t>(model.size()),
                                                  cfg.seed, cfg.min_samples);
    const TrainingSet ts = build_training_set(plan, emb, model.exponents, g, cfg.jobs);

    // Regression through the origin: scale columns to unit RMS, no centering.
    const double rows = static_cast<double>(ts.A.rows());
    Eigen::VectorXd scale = (ts.A.colwise().squaredNorm() / rows).cwiseSqrt().transpose();
    for (Eigen::Index h = 0; h < scale.size(); ++h)
        if (!(scale[h] > 0.0))
            scale[h] = 1.0;
    const Eigen::MatrixXd standardized = ts.A * scale.cwiseInverse().asDiagonal();
    const auto fit = lasso_fit(standardized, ts.b, cfg.lambda, cfg.lasso);
    model.coefficients = fit.coefficients.cwiseQuotient(scale);

    const Eigen::VectorXd residual = ts.A * model.coefficients - ts.b;
    model.training = {
        {"samples", ts.A.rows()},
        {"s1", plan.s1.size()},
        {"s2", plan.s2.size()},
        {"min_samples", plan.min_samples},
        {"seed", cfg.seed},
        {"sweeps", fit.sweeps},
        {"converged", fit.converged},
        {"residual_rms", std::sqrt(residual.squaredNorm() / rows)},
        {"target_rms", std::sqrt(ts.b.squaredNorm() / rows)},
        {"nonzero_coefficients", (model.coefficients.array() != 0.0).count()},
    };
    return model;
}

nlohmann::json to_json(const PolynomialModel& model)
{
    nlohmann::json monomials = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.exponents.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < model.exponents.cols(); ++c)
            row.push_back(model.exponents(r, c));
        monomials.push_back(std::move(row));
    }
    return {
        {"type", "polynomial"},
        {"k", model.k},
        {"D", model.degree},
        {"M", model.exponents.rows()},
        {"monomials", monomials},
        {"coefficients", std::vector<double>(model.coefficients.data(), model.coefficients.data() + model.size())},
        {"lambda", model.lambda},
        {"training", model.training},
    };
}

PolynomialModel polynomial_model_from_json(const nlohmann::json& j)
{
    PolynomialModel model;
    model.k = j.at("k").get<int>();
    model.degree = j.at("D").get<int>();
    model.lambda = j.value("lambda", 0.0);
    if (j.contains("training"))
        model.training = j["training"];
    const auto& monomials = j.at("monomials");
    const auto coefficients = j.at("coefficients").get<std::vector<double>>();
    if (monomials.size() != coefficients.size())
        throw ParseError("model has " + std::to_string(monomials.size()) + " monomials but "
                         + std::to_string(coefficients.size()) + " coefficients");
    model.exponents.resize(static_cast<Eigen::Index>(monomials.size()), model.k);
    for (std::size_t r = 0; r < monomials.size(); ++r) {
        const auto row = monomials[r].get<std::vector<int>>();
        if (row.size() != static_cast<std::size_t>(model.k))
            throw ParseError("monomial " + std::to_string(r) + " has the wrong arity");
        int total = 0;
        for (int c = 0; c < model.k; ++c) {
            if (row[c] < 0)
                throw ParseError("negative exponent in monomial " + std::to_string(r));
            total += row[c];
            model.exponents(static_cast<Eigen::Index>(r), c) = row[c];
        }
        if (total > model.degree)
            throw ParseError("monomial " + std::to_string(r) + " exceeds the declared degree");
    }
    model.coefficients = Eigen::Map<const Eigen::VectorXd>(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    return model;
}

} // namespace fmd

#include <cmath>
#include <random>
#include <set>

#include <Eigen/Cholesky>

#include "doctest.h"

#include "fastmapd/embedder.hpp"
#include "fastmapd/errors.hpp"
#include "fastmapd/evaluation.hpp"
#include "fastmapd/lasso.hpp"
#include "fastmapd/monomials.hpp"
#include "fastmapd/potential.hpp"
#include "fastmapd/shortest_paths.hpp"
#include "support.hpp"

using namespace fmd;

namespace {

std::size_t binomial(std::size_t n, std::size_t k)
{
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

Embedding line_embedding(const std::vector<double>& x, std::vector<PivotPair> pivots)
{
    Embedding emb;
    emb.k = 1;
    emb.coords = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), 2);
    for (std::size_t i = 0; i < x.size(); ++i)
        emb.coords(static_cast<Eigen::Index>(i), 0) = x[i];
    emb.pivots = std::move(pivots);
    return emb;
}

Eigen::VectorXd ols(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    return (A.transpose() * A).ldlt().solve(A.transpose() * b);
}

} // namespace

TEST_CASE("monomial counts and order")
{
    CHECK(monomial_count(1, 2) == 3);
    CHECK(monomial_count(3, 2) == 10);
    CHECK(monomial_count(2, 3) == 10);
    CHECK(monomial_count(15, 2) == 136);
    CHECK_THROWS_AS(monomial_count(200, 6), std::overflow_error);

    const auto one = enumerate_monomials(1, 2);
    REQUIRE(one.rows() == 3);
    CHECK(one(0, 0) == 0);
    CHECK(one(1, 0) == 1);
    CHECK(one(2, 0) == 2);

    const auto two = enumerate_monomials(2, 2);
    const std::vector<std::pair<int, int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    REQUIRE(two.rows() == 6);
    for (Eigen::Index r = 0; r < 6; ++r)
        CHECK(std::make_pair(two(r, 0), two(r, 1)) == expected[static_cast<std::size_t>(r)]);
}

TEST_CASE("property: enumeration matches the binomial formula and is exhaustive")
{
    for (int k = 1; k <= 6; ++k) {
        for (int d = 0; d <= 4; ++d) {
            const auto table = enumerate_monomials(k, d);
            std::size_t formula = 0;
            for (int i = 0; i <= d; ++i)
                formula += binomial(static_cast<std::size_t>(i + k - 1), static_cast<std::size_t>(k - 1));
            CHECK(static_cast<std::size_t>(table.rows()) == formula);
            CHECK(monomial_count(k, d) == formula);
            std::set<std::vector<int>> seen;
            int previous_degree = 0;
            for (Eigen::Index r = 0; r < table.rows(); ++r) {
                std::vector<int> e(table.row(r).data(), table.row(r).data() + k);
                int degree = 0;
                for (int v : e) {
                    CHECK(v >= 0);
                    degree += v;
                }
                CHECK(degree <= d);
                CHECK(degree >= previous_degree);
                previous_degree = degree;
                seen.insert(e);
            }
            CHECK(seen.size() == formula);
            CHECK(table.row(0).isZero());
        }
    }
}

TEST_CASE("sampling plan sizes")
{
    SUBCASE("policy arithmetic")
    {
        std::vector<PivotPair> pivots{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 7}};
        const auto emb = line_embedding(std::vector<double>(100, 0.0), pivots);
        const auto plan = build_sampling_plan(emb, 100, 45, 1, 200);
        CHECK(plan.s1.size() == 8);
        CHECK(plan.s2.size() == 25);
        CHECK(plan.sample_count() == 200);
        CHECK(std::set<VertexId>(plan.s2.begin(), plan.s2.end()).size() == 25);
    }
    SUBCASE("tiny valid plan")
    {
        const auto emb = line_embedding({0.0, 2.0}, {{0, 1}});
        const auto plan = build_sampling_plan(emb, 2, 3, 1, 3);
        CHECK(plan.s1.size() == 2);
        CHECK(plan.s2.size() == 2);
        CHECK(plan.sample_count() >= 3);
    }
    SUBCASE("too few vertices")
    {
        const auto emb = line_embedding({0.0, 2.0}, {{0, 1}});
        CHECK_THROWS_AS(build_sampling_plan(emb, 2, 100, 1), std::invalid_argument);
    }
}

TEST_CASE("training rows")
{
    const auto g = testing::symmetric_graph(2, {{0, 1, 1.0}});
    const auto emb = line_embedding({1.0, 2.0}, {{0, 1}});
    SamplingPlan plan;
    plan.s1 = {0};
    plan.s2 = {1};
    const auto ts = build_training_set(plan, emb, enumerate_monomials(1, 2), g);
    REQUIRE(ts.A.rows() == 1);
    CHECK(ts.A(0, 0) == 0.0);
    CHECK(ts.A(0, 1) == 1.0);
    CHECK(ts.A(0, 2) == 3.0);
    CHECK(ts.b[0] == 0.0);
}

TEST_CASE("training targets are corrections and the constant column vanishes")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = testing::random_strong_graph(30, seed);
        EmbedConfig cfg;
        cfg.k_max = 4;
        cfg.seed = seed;
        const auto emb = embed_average_distances(g, cfg);
        const auto exps = enumerate_monomials(emb.k, 2);
        const auto plan = build_sampling_plan(emb, g.vertex_count(), static_cast<std::size_t>(exps.rows()), seed);
        const auto ts = build_training_set(plan, emb, exps, g, 2);
        CHECK(ts.A.col(0).isZero());
        const auto oracle = all_pairs_oracle(g);
        for (Eigen::Index s = 0; s < ts.b.size(); ++s) {
            const auto [i, j] = ts.pairs[static_cast<std::size_t>(s)];
            CHECK(ts.b[s] == doctest::Approx(oracle(i, j) - (oracle(i, j) + oracle(j, i)) / 2).epsilon(1e-12));
        }
    }
    const auto sym = testing::symmetric_graph(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}});
    EmbedConfig cfg;
    cfg.k_max = 3;
    const auto emb = embed_average_distances(sym, cfg);
    SamplingPlan plan;
    plan.s1 = {0, 3};
    plan.s2 = {0, 1, 2, 3};
    CHECK(build_training_set(plan, emb, enumerate_monomials(emb.k, 2), sym).b.isZero());
}

TEST_CASE("lasso examples")
{
    const Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
    const auto r = lasso_fit(identity, Eigen::Vector2d(1, 2), 0.0);
    CHECK(r.converged);
    CHECK(r.coefficients == Eigen::Vector2d(1, 2));

    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    Eigen::VectorXd two(1);
    two << 2.0;
    CHECK(lasso_fit(one, two, 0.5).coefficients[0] == 1.5);
    CHECK(soft_threshold(-2.0, 0.5) == -1.5);
    CHECK(soft_threshold(0.3, 0.5) == 0.0);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd A(30, 5);
    Eigen::VectorXd b(30);
    for (Eigen::Index i = 0; i < A.size(); ++i)
        A.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i)
        b[i] = normal(rng);
    const double lambda_max = (A.transpose() * b).cwiseAbs().maxCoeff();
    CHECK(lasso_fit(A, b, lambda_max).coefficients.isZero());

    Eigen::MatrixXd with_zero = Eigen::MatrixXd::Zero(30, 3);
    with_zero.col(1) = A.col(0);
    with_zero.col(2) = A.col(1);
    CHECK(lasso_fit(with_zero, b, 0.0).coefficients[0] == 0.0);
}

TEST_CASE("lasso input validation")
{
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(lasso_fit(A, Eigen::Vector3d(1, 2, 3), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lasso_fit(A, Eigen::Vector2d(1, 2), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(lasso_fit(A, Eigen::Vector2d(1, std::nan("")), 0.0), NumericError);
}

TEST_CASE("property: lasso approaches OLS, shrinks with lambda and descends monotonically")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd A(50, 6);
        Eigen::VectorXd b(50);
        for (Eigen::Index i = 0; i < A.size(); ++i)
            A.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b[i] = normal(rng);

        const Eigen::VectorXd reference = ols(A, b);
        const auto fit = lasso_fit(A, b, 1e-8);
        CHECK(fit.converged);
        CHECK((fit.coefficients - reference).norm() <= 1e-4 * reference.norm());

        double previous_l1 = std::numeric_limits<double>::infinity();
        for (double lambda : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
            const double l1 = lasso_fit(A, b, lambda).coefficients.lpNorm<1>();
            CHECK(l1 <= previous_l1 + 1e-8);
            previous_l1 = l1;
        }

        LassoOptions opts;
        opts.record_objective = true;
        const auto traced = lasso_fit(A, b, 0.7, opts);
        double previous = 0.5 * b.squaredNorm();
        for (double value : traced.objective) {
            CHECK(value <= previous + 1e-12);
            previous = value;
        }
    }
}

TEST_CASE("property: planted degree-2 potential is recovered")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const int k = 3;
    const auto exps = enumerate_monomials(k, 2);
    Eigen::VectorXd planted(exps.rows());
    std::normal_distribution<double> normal;
    for (Eigen::Index r = 0; r < planted.size(); ++r)
        planted[r] = normal(rng);
    Eigen::MatrixXd points(40, k);
    for (Eigen::Index i = 0; i < points.size(); ++i)
        points.data()[i] = coord(rng);
    Eigen::MatrixXd A(40 * 39, exps.rows());
    Eigen::VectorXd b(40 * 39);
    Eigen::Index s = 0;
    for (Eigen::Index i = 0; i < 40; ++i)
        for (Eigen::Index j = 0; j < 40; ++j)
            if (i != j) {
                const Eigen::VectorXd m = evaluate_monomials(exps, points.row(j).transpose())
                                          - evaluate_monomials(exps, points.row(i).transpose());
                A.row(s) = m.transpose();
                b[s++] = m.dot(planted);
            }
    LassoOptions opts;
    opts.tol = 1e-14;
    const auto fit = lasso_fit(A, b, 1e-8, opts);
    CHECK((A * fit.coefficients - b).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("assign_last_coordinate")
{
    auto emb = line_embedding({0.0, 1.5, -2.0, 4.0}, {{0, 3}});
    auto constant = PolynomialModel::zero(1, 2);
    constant.coefficients[0] = 5.0;
    assign_last_coordinate(emb, constant);
    CHECK((emb.potential().array() == 5.0).all());
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            CHECK(odot_distance(emb.coords.row(i), emb.coords.row(j))
                  == std::abs(emb.coords(j, 0) - emb.coords(i, 0)));

    auto identity = PolynomialModel::zero(1, 1);
    identity.coefficients[1] = 1.0;
    assign_last_coordinate(emb, identity);
    CHECK(emb.potential() == emb.coords.col(0));

    assign_last_coordinate(emb, PolynomialModel::zero(1, 2));
    CHECK(emb.potential().isZero());

    CHECK_THROWS_AS(assign_last_coordinate(emb, PolynomialModel::zero(2, 2)), std::invalid_argument);
}

TEST_CASE("fit_potential reduces error on a directed grid and round-trips through JSON")
{
    const auto g = testing::random_strong_graph(80, 21);
    EmbedConfig cfg;
    cfg.k_max = 5;
    cfg.seed = 2;
    auto emb = embed_average_distances(g, cfg);
    PotentialFitConfig fit;
    fit.seed = 2;
    const auto model = fit_potential(g, emb, fit);
    CHECK(model.size() == static_cast<Eigen::Index>(monomial_count(emb.k, 2)));
    CHECK(model.coefficients[0] == 0.0);
    CHECK(model.training["residual_rms"].get<double>() <= model.training["target_rms"].get<double>());

    const auto back = polynomial_model_from_json(to_json(model));
    CHECK(back.coefficients == model.coefficients);
    CHECK(back.exponents == model.exponents);
    auto bad = to_json(model);
    bad["coefficients"].erase(0);
    CHECK_THROWS(polynomial_model_from_json(bad));
}

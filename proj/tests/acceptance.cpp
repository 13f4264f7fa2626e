// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Optional: a MovingAI map path as argv[1] or in FASTMAPD_MOVINGAI_MAP for the full-size checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "fastmapd/embedder.hpp"
#include "fastmapd/evaluation.hpp"
#include "fastmapd/grid.hpp"
#include "fastmapd/lasso.hpp"
#include "fastmapd/monomials.hpp"
#include "fastmapd/nn.hpp"
#include "fastmapd/potential.hpp"
#include "fastmapd/shortest_paths.hpp"
#include "support.hpp"

using namespace fmd;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-9;
constexpr double kOracleSeconds = 5.0;
constexpr double kOlsRelTol = 1e-4;
constexpr double kOlsLambda = 1e-8;
constexpr double kPlantedLambda = 1e-8;
constexpr double kPlantedTol = 1e-6;
constexpr double kAntisymmetryTol = 1e-9;
constexpr double kGaugeTol = 1e-12;
constexpr double kGradientRelTol = 1e-4;
constexpr double kHalfFastMap = 0.5;
constexpr double kScalingRatio = 3.0;
constexpr double kPipelineSeconds = 120.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o)
{
    std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] " << id << ". " << name << ": " << o.detail << std::endl;
    failures += !o.pass;
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

// 1 ---------------------------------------------------------------------------------------------

Outcome oracle_equivalence()
{
    const auto start = Clock::now();
    double worst_sssp = 0.0;
    double worst_avg = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 10 + seed % 51;
        const auto g = testing::random_strong_graph(n, 1000 + seed, 10.0);
        const auto rev = reverse_graph(g);
        const Eigen::MatrixXd d = all_pairs_oracle(g);
        for (VertexId r = 0; r < n; ++r) {
            worst_sssp = std::max(worst_sssp, (sssp(g, r).dist - d.row(r).transpose()).cwiseAbs().maxCoeff());
            const Eigen::VectorXd expected = (d.row(r).transpose() + d.col(r)) / 2.0;
            worst_avg = std::max(worst_avg, (average_distance(g, rev, r) - expected).cwiseAbs().maxCoeff());
        }
    }
    const double elapsed = seconds_since(start);
    return {worst_sssp <= kOracleTol && worst_avg <= kOracleTol && elapsed < kOracleSeconds,
            "max |sssp - FW| = " + fmt(worst_sssp) + ", max |avg - FW| = " + fmt(worst_avg) + ", "
                + fmt(elapsed) + " s (limits " + fmt(kOracleTol) + ", " + fmt(kOracleSeconds) + " s)"};
}

// 2 ---------------------------------------------------------------------------------------------

Outcome pivot_postcondition()
{
    std::size_t columns = 0;
    std::size_t violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = testing::random_strong_graph(20 + 2 * seed, 2000 + seed);
        EmbedConfig cfg;
        cfg.k_max = 10;
        cfg.seed = seed;
        const DirectedGraph rev = reverse_graph(g);
        AverageDistances distances(g);
        auto emb = start_embedding(g.vertex_count(), cfg);
        std::mt19937_64 rng(cfg.seed);
        for (int it = 0; it + 1 < cfg.k_max; ++it) {
            const auto pair = choose_farthest_pair(distances, emb, cfg, rng);
            const Eigen::Index col = emb.k;
            const double raw = residual_sq(average_distance(g, rev, pair.a)[pair.b], emb.coords.row(pair.b),
                                           emb.coords.row(pair.a), col, true);
            const double d_ab = raw < cfg.epsilon ? 1.0 : raw;
            if (!compute_coordinate_column(distances, emb, pair, cfg))
                break;
            ++columns;
            violations += emb.coords(pair.a, col) != 0.0 || emb.coords(pair.b, col) != std::sqrt(d_ab);
        }
    }
    return {violations == 0 && columns > 0,
            std::to_string(columns) + " columns checked, " + std::to_string(violations) + " exact mismatches"};
}

// 3 ---------------------------------------------------------------------------------------------

Outcome lasso_correctness()
{
    double worst_rel = 0.0;
    bool l1_monotone = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(3000 + seed);
        std::normal_distribution<double> normal;
        const Eigen::Index rows = 40 + static_cast<Eigen::Index>(seed);
        const Eigen::Index cols = 3 + static_cast<Eigen::Index>(seed % 6);
        Eigen::MatrixXd A(rows, cols);
        Eigen::VectorXd b(rows);
        for (Eigen::Index i = 0; i < A.size(); ++i)
            A.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < rows; ++i)
            b[i] = normal(rng);
        const Eigen::VectorXd ols = (A.transpose() * A).ldlt().solve(A.transpose() * b);
        const auto fit = lasso_fit(A, b, kOlsLambda);
        worst_rel = std::max(worst_rel, (fit.coefficients - ols).norm() / ols.norm());

        double previous = std::numeric_limits<double>::infinity();
        for (double lambda = 0.01; lambda < 100.0; lambda *= 1.7) {
            const double l1 = lasso_fit(A, b, lambda).coefficients.lpNorm<1>();
            l1_monotone = l1_monotone && l1 <= previous + 1e-10;
            previous = l1;
        }
    }

    bool closed_form = true;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    for (int t = 0; t < 200; ++t) {
        Eigen::MatrixXd a(1, 1);
        a << uni(rng);
        Eigen::VectorXd b(1);
        b << uni(rng);
        const double lambda = std::abs(uni(rng));
        const double rho = a(0, 0) * b[0];
        const double expected = soft_threshold(rho, lambda) / (a(0, 0) * a(0, 0));
        closed_form = closed_form && lasso_fit(a, b, lambda).coefficients[0] == expected;
    }
    closed_form = closed_form && soft_threshold(2.0, 0.5) == 1.5;

    return {worst_rel <= kOlsRelTol && closed_form && l1_monotone,
            "max relative OLS gap " + fmt(worst_rel) + " (limit " + fmt(kOlsRelTol) + "), soft threshold exact: "
                + (closed_form ? "yes" : "no") + ", l1 monotone: " + (l1_monotone ? "yes" : "no")};
}

// 4 ---------------------------------------------------------------------------------------------

Outcome planted_recovery()
{
    const auto g = testing::random_strong_graph(60, 4000);
    EmbedConfig cfg;
    cfg.k_max = 5;
    cfg.seed = 4;
    const auto emb = embed_average_distances(g, cfg);
    const auto exps = enumerate_monomials(emb.k, 2);
    const auto plan = build_sampling_plan(emb, g.vertex_count(), static_cast<std::size_t>(exps.rows()), 4);
    auto ts = build_training_set(plan, emb, exps, g);

    std::mt19937_64 rng(44);
    std::normal_distribution<double> normal;
    Eigen::VectorXd planted(exps.rows());
    for (Eigen::Index r = 0; r < planted.size(); ++r)
        planted[r] = normal(rng);
    ts.b = ts.A * planted;

    LassoOptions opts;
    opts.tol = 1e-13;
    opts.max_sweeps = 1'000'000;
    const auto fit = lasso_fit(ts.A, ts.b, kPlantedLambda, opts);

    auto fitted = PolynomialModel::zero(emb.k, 2);
    fitted.coefficients = fit.coefficients;
    auto truth = PolynomialModel::zero(emb.k, 2);
    truth.coefficients = planted;
    Eigen::VectorXd psi_fit(emb.vertex_count());
    Eigen::VectorXd psi_true(emb.vertex_count());
    for (Eigen::Index v = 0; v < emb.vertex_count(); ++v) {
        psi_fit[v] = fitted(emb.coords.row(v).head(emb.k).transpose());
        psi_true[v] = truth(emb.coords.row(v).head(emb.k).transpose());
    }
    const Eigen::VectorXd gap = psi_fit - psi_true;
    const double pairwise = gap.maxCoeff() - gap.minCoeff();
    const double training = (ts.A * fit.coefficients - ts.b).cwiseAbs().maxCoeff();
    return {pairwise < kPlantedTol && training < kPlantedTol,
            "max pairwise correction error " + fmt(pairwise) + " over all vertex pairs, training " + fmt(training)
                + " (limit " + fmt(kPlantedTol) + ", " + std::to_string(fit.sweeps) + " sweeps)"};
}

// 5 ---------------------------------------------------------------------------------------------

Outcome dimension_trend(const std::string& map_path)
{
    const auto grid = grid_to_directed_graph(random_obstacle_map(64, 64, 0.2, 1), HeightFunction::Polynomial);
    SweepConfig cfg;
    cfg.dimensions = {4, 16};
    cfg.degrees = {2};
    cfg.seeds = {1, 2, 3};
    cfg.methods = {Method::FastMap, Method::FastMapDLasso};
    const auto reports = sweep(grid.graph, cfg);
    auto mean = [&](Method m, int k) {
        double sum = 0.0;
        int count = 0;
        for (const auto& r : reports)
            if (r.method == m && r.k == k) {
                sum += r.nrmse;
                ++count;
            }
        return sum / count;
    };
    const double fm16 = mean(Method::FastMap, 16);
    const double fmd16 = mean(Method::FastMapDLasso, 16);
    const double fmd4 = mean(Method::FastMapDLasso, 4);
    const bool beats = fmd16 < fm16;
    const bool improves = fmd16 < fmd4;
    Outcome o{beats && improves,
              "64x64 (" + std::to_string(grid.graph.vertex_count()) + " vertices), mean over seeds 1-3: FastMap K=16 "
                  + fmt(fm16) + ", FastMap-D K=16 " + fmt(fmd16) + " [" + (beats ? "<" : "not <")
                  + " FastMap], FastMap-D K=4 " + fmt(fmd4) + " [K=16 " + (improves ? "<" : "not <") + " K=4]"};

    if (map_path.empty()) {
        o.detail += "; full-size map checks not run (no MovingAI map given)";
        return o;
    }
    const auto full = grid_to_directed_graph(load_movingai_map_file(map_path), HeightFunction::Polynomial);
    SweepConfig big;
    big.dimensions = {16};
    big.seeds = {1};
    big.methods = {Method::FastMap, Method::FastMapDLasso, Method::FastMapDNn, Method::DirectNn};
    const auto full_reports = sweep(full.graph, big, &full.cells);
    auto value = [&](Method m) {
        for (const auto& r : full_reports)
            if (r.method == m)
                return r.nrmse;
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double fm = value(Method::FastMap);
    const double lasso = value(Method::FastMapDLasso);
    const double nn = value(Method::FastMapDNn);
    const double direct = value(Method::DirectNn);
    const bool full_ok = lasso < fm && lasso < kHalfFastMap * fm && lasso < direct && nn < direct;
    o.pass = o.pass && full_ok;
    o.detail += "; " + map_path + ": FastMap " + fmt(fm) + ", FastMap-D(LASSO) " + fmt(lasso) + ", FastMap-D(NN) "
                + fmt(nn) + ", DirectNN " + fmt(direct) + (full_ok ? " [ordering holds]" : " [ordering violated]");
    return o;
}

// 6 ---------------------------------------------------------------------------------------------

Outcome gauge_and_antisymmetry()
{
    const auto grid = grid_to_directed_graph(random_obstacle_map(32, 32, 0.2, 6), HeightFunction::Polynomial);
    EmbedConfig cfg;
    cfg.seed = 6;
    auto emb = embed_average_distances(grid.graph, cfg);
    PotentialFitConfig fit;
    fit.seed = 6;
    assign_last_coordinate(emb, fit_potential(grid.graph, emb, fit));

    std::mt19937_64 rng(66);
    std::uniform_int_distribution<Eigen::Index> pick(0, emb.vertex_count() - 1);
    double worst = 0.0;
    for (int s = 0; s < 10'000; ++s) {
        const auto i = pick(rng);
        const auto j = pick(rng);
        const double euclid = (emb.coords.row(j).head(emb.k) - emb.coords.row(i).head(emb.k)).norm();
        const double sum = odot_distance(emb.coords.row(i), emb.coords.row(j))
                           + odot_distance(emb.coords.row(j), emb.coords.row(i));
        worst = std::max(worst, std::abs(sum - 2.0 * euclid));
    }

    SamplingOptions sampling;
    sampling.pairs = 10'000;
    sampling.seed = 6;
    const auto samples = sample_distances(grid.graph, sampling);
    const double before = nrmse(samples, emb);
    emb.potential().array() += 1000.0;
    const double after = nrmse(samples, emb);
    const double shift = std::abs(after - before);
    return {worst <= kAntisymmetryTol && shift <= kGaugeTol,
            "max |odot(i,j)+odot(j,i)-2 euclid| = " + fmt(worst) + " (limit " + fmt(kAntisymmetryTol)
                + "), NRMSE change under shift = " + fmt(shift) + " (limit " + fmt(kGaugeTol) + ")"};
}

// 7 ---------------------------------------------------------------------------------------------

Outcome gradient_check()
{
    const std::vector<std::pair<std::vector<int>, NnMode>> nets{
        {{4, 7, 1}, NnMode::PairEmbedding}, {{3, 6, 5, 1}, NnMode::Potential}, {{6, 8, 4, 3, 1}, NnMode::PairGrid}};
    double worst = 0.0;
    std::uint64_t seed = 70;
    for (const auto& [sizes, mode] : nets) {
        auto model = MlpModel::create(sizes, mode, seed);
        std::mt19937_64 rng(seed++);
        std::normal_distribution<double> normal(0.0, 0.5);
        Eigen::VectorXd params(static_cast<Eigen::Index>(model.parameter_count()));
        for (Eigen::Index i = 0; i < params.size(); ++i)
            params[i] = normal(rng);
        model.set_flat_parameters(params);
        model.output_scale = 2.0;

        NnData data;
        data.first.resize(sizes.front(), 12);
        for (Eigen::Index i = 0; i < data.first.size(); ++i)
            data.first.data()[i] = normal(rng);
        if (mode == NnMode::Potential) {
            data.second.resize(sizes.front(), 12);
            for (Eigen::Index i = 0; i < data.second.size(); ++i)
                data.second.data()[i] = normal(rng);
        }
        data.target.resize(12);
        for (Eigen::Index i = 0; i < 12; ++i)
            data.target[i] = normal(rng);

        Eigen::VectorXd analytic;
        mlp_loss_and_gradient(model, data, &analytic);
        for (Eigen::Index p = 0; p < params.size(); ++p) {
            const double h = 1e-6 * std::max(1.0, std::abs(params[p]));
            Eigen::VectorXd shifted = params;
            shifted[p] += h;
            model.set_flat_parameters(shifted);
            const double up = mlp_loss_and_gradient(model, data);
            shifted[p] -= 2.0 * h;
            model.set_flat_parameters(shifted);
            const double down = mlp_loss_and_gradient(model, data);
            const double numeric = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(numeric), std::abs(analytic[p]), 1e-3});
            worst = std::max(worst, std::abs(numeric - analytic[p]) / scale);
        }
        model.set_flat_parameters(params);
    }
    return {worst < kGradientRelTol,
            "max relative gradient error " + fmt(worst) + " over 3 networks (limit " + fmt(kGradientRelTol) + ")"};
}

// 8 ---------------------------------------------------------------------------------------------

double median_embed_seconds(const DirectedGraph& g)
{
    std::vector<double> runs;
    for (std::uint64_t run = 0; run < 3; ++run) {
        EmbedConfig cfg;
        cfg.k_max = 8;
        cfg.seed = run + 1;
        const auto start = Clock::now();
        const auto emb = embed_average_distances(g, cfg);
        runs.push_back(seconds_since(start));
        if (emb.k != cfg.k_max - 1)
            throw std::logic_error("embedding stopped early");
    }
    std::sort(runs.begin(), runs.end());
    return runs[1];
}

Outcome near_linear_scaling()
{
    const auto small = grid_to_directed_graph(random_obstacle_map(128, 128, 0.2, 8), HeightFunction::Polynomial);
    const auto large_map = random_obstacle_map(256, 256, 0.2, 8);
    const auto large = grid_to_directed_graph(large_map, HeightFunction::Polynomial);
    const double t_small = median_embed_seconds(small.graph);
    const double t_large = median_embed_seconds(large.graph);
    const double ratio = t_large / t_small;

    const auto start = Clock::now();
    const auto synthesized = grid_to_directed_graph(large_map, HeightFunction::Polynomial);
    EmbedConfig cfg;
    cfg.seed = 1;
    auto emb = embed_average_distances(synthesized.graph, cfg);
    PotentialFitConfig fit;
    fit.seed = 1;
    assign_last_coordinate(emb, fit_potential(synthesized.graph, emb, fit));
    SamplingOptions sampling;
    sampling.seed = 1;
    const double score = nrmse(sample_distances(synthesized.graph, sampling), emb);
    const double pipeline = seconds_since(start);

    return {ratio < kScalingRatio && pipeline < kPipelineSeconds,
            "K_max=8 median of 3: 128x128 (" + std::to_string(small.graph.vertex_count()) + " vertices) "
                + fmt(t_small * 1e3) + " ms, 256x256 (" + std::to_string(large.graph.vertex_count()) + " vertices) "
                + fmt(t_large * 1e3) + " ms, ratio " + fmt(ratio) + " (limit " + fmt(kScalingRatio)
                + "); full 256x256 pipeline " + fmt(pipeline) + " s, NRMSE " + fmt(score) + " (limit "
                + fmt(kPipelineSeconds) + " s)"};
}

Outcome guarded(const std::function<Outcome()>& fn)
{
    try {
        return fn();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main(int argc, char** argv)
{
    std::string map_path;
    if (argc > 1)
        map_path = argv[1];
    else if (const char* env = std::getenv("FASTMAPD_MOVINGAI_MAP"))
        map_path = env;

    report(1, "shortest-path oracle equivalence", guarded(oracle_equivalence));
    report(2, "pivot post-condition", guarded(pivot_postcondition));
    report(3, "LASSO correctness", guarded(lasso_correctness));
    report(4, "planted-potential recovery", guarded(planted_recovery));
    report(5, "dimension trend at desk scale", guarded([&] { return dimension_trend(map_path); }));
    report(6, "gauge and antisymmetry invariants", guarded(gauge_and_antisymmetry));
    report(7, "NN gradient check", guarded(gradient_check));
    report(8, "near-linear scaling", guarded(near_linear_scaling));
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}

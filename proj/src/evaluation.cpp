#include "fastmapd/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <tuple>
#include <unordered_set>

#include "fastmapd/errors.hpp"
#include "fastmapd/parallel.hpp"
#include "fastmapd/shortest_paths.hpp"

namespace fmd {

std::vector<DistanceSample> sample_distances(const DirectedGraph& g, const SamplingOptions& opts)
{
    const std::size_t n = g.vertex_count();
    if (n < 2)
        throw std::invalid_argument("distance sampling needs at least two vertices");
    if (opts.pairs == 0)
        throw std::invalid_argument("number of sampled pairs must be at least 1");

    std::vector<DistanceSample> samples;
    const std::size_t all_pairs = n * (n - 1);
    if (opts.pairs >= all_pairs) {
        samples.reserve(all_pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    samples.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), 0.0});
    } else {
        std::mt19937_64 rng(opts.seed);
        std::vector<VertexId> pool(n);
        for (std::size_t v = 0; v < n; ++v)
            pool[v] = static_cast<VertexId>(v);
        std::size_t pool_size = n;
        if (opts.source_pool != 0 && opts.source_pool < n) {
            pool_size = opts.source_pool;
            for (std::size_t i = 0; i < pool_size; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
        }
        std::uniform_int_distribution<std::size_t> pick_source(0, pool_size - 1);
        std::uniform_int_distribution<std::size_t> pick_target(0, n - 2);
        samples.reserve(opts.pairs);
        for (std::size_t s = 0; s < opts.pairs; ++s) {
            const VertexId source = pool[pick_source(rng)];
            std::size_t target = pick_target(rng);
            if (target >= source)
                ++target;
            samples.push_back({source, static_cast<VertexId>(target), 0.0});
        }
    }

    // Group by source so each tree is computed once.
    std::map<VertexId, std::vector<std::size_t>> by_source;
    for (std::size_t s = 0; s < samples.size(); ++s)
        by_source[samples[s].source].push_back(s);
    std::vector<std::pair<VertexId, const std::vector<std::size_t>*>> groups;
    for (const auto& [source, indices] : by_source)
        groups.emplace_back(source, &indices);

    parallel_for(groups.size(), opts.jobs, [&](std::size_t gi) {
        const auto [source, indices] = groups[gi];
        const DistanceVector tree = sssp(g, source);
        for (std::size_t s : *indices) {
            const double d = tree.dist[samples[s].target];
            if (!is_reachable(d))
                throw ConnectivityError("graph not strongly connected: vertex " + std::to_string(samples[s].target)
                                            + " unreachable from " + std::to_string(source),
                                        samples[s].target);
            samples[s].distance = d;
        }
    });
    return samples;
}

double nrmse(const std::vector<DistanceSample>& samples, const std::function<double(VertexId, VertexId)>& estimate)
{
    if (samples.empty())
        throw std::invalid_argument("NRMSE needs at least one sample");
    double squared_error = 0.0;
    double total = 0.0;
    for (const auto& s : samples) {
        const double e = s.distance - estimate(s.source, s.target);
        squared_error += e * e;
        total += s.distance;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = total / n;
    if (!(mean > 0.0))
        throw NumericError("NRMSE undefined: all sampled true distances are zero");
    return std::sqrt(squared_error / n) / mean;
}

double nrmse(const std::vector<DistanceSample>& samples, const Embedding& emb)
{
    return nrmse(samples, [&](VertexId i, VertexId j) {
        return odot_distance(emb.coords.row(i), emb.coords.row(j));
    });
}

double nrmse(const DirectedGraph& g, const Embedding& emb, std::size_t n, std::uint64_t seed)
{
    SamplingOptions opts;
    opts.pairs = n;
    opts.seed = seed;
    return nrmse(sample_distances(g, opts), emb);
}

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::FastMap:
        return "fastmap";
    case Method::FastMapDLasso:
        return "fastmapd-lasso";
    case Method::FastMapDNn:
        return "fastmapd-nn";
    case Method::DirectNn:
        return "direct-nn";
    }
    return "?";
}

Method parse_method(std::string_view name)
{
    for (Method m : {Method::FastMap, Method::FastMapDLasso, Method::FastMapDNn, Method::DirectNn})
        if (name == to_string(m))
            return m;
    throw std::invalid_argument("unknown method '" + std::string(name)
                                + "' (expected fastmap, fastmapd-lasso, fastmapd-nn or direct-nn)");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::size_t distinct_pivot_vertices(const Embedding& emb)
{
    std::unordered_set<VertexId> seen;
    for (const auto& p : emb.pivots) {
        seen.insert(p.a);
        seen.insert(p.b);
    }
    return std::max<std::size_t>(1, seen.size());
}

std::vector<int> with_ends(int in, const std::vector<int>& hidden)
{
    std::vector<int> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    return sizes;
}

} // namespace

std::vector<EvalReport> sweep(const DirectedGraph& g, const SweepConfig& cfg, const std::vector<Cell>* cells)
{
    const auto has = [&](Method m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
    if (has(Method::DirectNn) && !cells)
        throw std::invalid_argument("direct-nn needs grid coordinates (vertex-to-cell mapping)");
    for (int k : cfg.dimensions)
        if (k < 2)
            throw std::invalid_argument("every swept dimensionality K must be at least 2");

    std::vector<EvalReport> reports;
    for (std::uint64_t seed : cfg.seeds) {
        SamplingOptions sampling;
        sampling.pairs = cfg.eval_pairs;
        sampling.source_pool = cfg.source_pool;
        sampling.seed = seed;
        sampling.jobs = cfg.jobs;
        auto t0 = Clock::now();
        const std::vector<DistanceSample> truth = sample_distances(g, sampling);
        const double truth_ms = elapsed_ms(t0);

        for (int k : cfg.dimensions) {
            EmbedConfig embed_cfg;
            embed_cfg.epsilon = cfg.epsilon;
            embed_cfg.pivot_iters = cfg.pivot_iters;
            embed_cfg.seed = seed;

            auto base = [&](Method m, int degree) {
                EvalReport r;
                r.map = cfg.map_id;
                r.heights = cfg.heights;
                r.method = m;
                r.k = k;
                r.degree = degree;
                r.seed = seed;
                r.samples = truth.size();
                return r;
            };

            if (has(Method::FastMap)) {
                EvalReport r = base(Method::FastMap, 0);
                embed_cfg.k_max = k + 1;
                t0 = Clock::now();
                const Embedding emb = embed_average_distances(g, embed_cfg);
                r.embed_ms = elapsed_ms(t0);
                t0 = Clock::now();
                r.nrmse = nrmse(truth, emb);
                r.eval_ms = elapsed_ms(t0) + truth_ms;
                reports.push_back(r);
            }

            const bool needs_embedding = has(Method::FastMapDLasso) || has(Method::FastMapDNn);
            if (!needs_embedding && !has(Method::DirectNn))
                continue;
            embed_cfg.k_max = k;
            t0 = Clock::now();
            const Embedding emb = embed_average_distances(g, embed_cfg);
            const double embed_ms = elapsed_ms(t0);

            if (has(Method::FastMapDLasso)) {
                for (int degree : cfg.degrees) {
                    EvalReport r = base(Method::FastMapDLasso, degree);
                    r.embed_ms = embed_ms;
                    PotentialFitConfig fit_cfg;
                    fit_cfg.degree = degree;
                    fit_cfg.lambda = cfg.lambda;
                    fit_cfg.seed = seed;
                    fit_cfg.jobs = cfg.jobs;
                    t0 = Clock::now();
                    Embedding fitted = emb;
                    assign_last_coordinate(fitted, fit_potential(g, emb, fit_cfg));
                    r.fit_ms = elapsed_ms(t0);
                    t0 = Clock::now();
                    r.nrmse = nrmse(truth, fitted);
                    r.eval_ms = elapsed_ms(t0) + truth_ms;
                    reports.push_back(r);
                }
            }

            const std::size_t roots = distinct_pivot_vertices(emb);
            auto run_nn = [&](Method m, NnMode mode, const std::vector<int>& hidden) {
                EvalReport r = base(m, 0);
                r.embed_ms = m == Method::DirectNn ? 0.0 : embed_ms;
                t0 = Clock::now();
                const auto samples = sample_tree_training_data(g, roots, seed, cfg.jobs);
                const NnData data = make_nn_data(mode, samples, emb, cells);
                const int inputs = static_cast<int>(data.first.rows());
                MlpModel model = MlpModel::create(with_ends(inputs, hidden), mode, seed);
                NnTrainConfig train = cfg.nn_train;
                train.seed = seed;
                mlp_train(model, data, train);
                r.fit_ms = elapsed_ms(t0);
                t0 = Clock::now();
                r.nrmse = nrmse(truth, [&](VertexId i, VertexId j) { return nn_distance_estimate(model, emb, cells, i, j); });
                r.eval_ms = elapsed_ms(t0) + truth_ms;
                reports.push_back(r);
            };
            if (has(Method::FastMapDNn))
                run_nn(Method::FastMapDNn, cfg.nn_mode, cfg.nn_hidden);
            if (has(Method::DirectNn))
                run_nn(Method::DirectNn, NnMode::PairGrid, cfg.direct_nn_hidden);
        }
    }
    std::sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
        return std::tie(a.method, a.k, a.degree, a.seed) < std::tie(b.method, b.k, b.degree, b.seed);
    });
    return reports;
}

void write_reports_csv(std::ostream& out, const std::vector<EvalReport>& reports)
{
    const std::ios_base::fmtflags flags = out.flags();
    const std::streamsize precision = out.precision();
    out << kReportHeader << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : reports) {
        out << r.map << ',' << r.heights << ',' << to_string(r.method) << ',' << r.k << ',' << r.degree << ','
            << r.seed << ',' << r.samples << ',' << r.nrmse << ',' << std::fixed << std::setprecision(3)
            << r.embed_ms << ',' << r.fit_ms << ',' << r.eval_ms << std::defaultfloat
            << std::setprecision(std::numeric_limits<double>::max_digits10) << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

} // namespace fmd

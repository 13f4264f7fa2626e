// Command-line front end: synth, embed, fit, fit-nn, eval, sweep, oracle-check, gen-map.
// Exit codes: 0 success, 1 computation error, 2 usage or I/O error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fastmapd/embedder.hpp"
#include "fastmapd/embedding_io.hpp"
#include "fastmapd/errors.hpp"
#include "fastmapd/evaluation.hpp"
#include "fastmapd/graph_io.hpp"
#include "fastmapd/grid.hpp"
#include "fastmapd/nn.hpp"
#include "fastmapd/potential.hpp"
#include "fastmapd/shortest_paths.hpp"

namespace {

using nlohmann::json;

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

/// Usage/I-O failures detected after argument parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    return out;
}

void write_json(const std::string& path, const json& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path)
{
    try {
        return json::parse(fmd::read_text_file(path));
    } catch (const json::parse_error& e) {
        throw fmd::ParseError(path + ": " + e.what());
    }
}

void write_manifest(const std::string& primary_output, const std::string& command, json parameters, json outputs)
{
    write_json(primary_output + ".manifest.json",
               {{"command", command}, {"parameters", std::move(parameters)}, {"outputs", std::move(outputs)}});
}

template <typename T>
std::vector<T> parse_list(const std::string& text)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::stringstream conv(item);
        T value{};
        if (!(conv >> value) || !conv.eof())
            throw UsageError("invalid list entry '" + item + "'");
        out.push_back(value);
    }
    if (out.empty())
        throw UsageError("empty list '" + text + "'");
    return out;
}

fmd::Connectivity to_connectivity(int c)
{
    if (c != 4 && c != 8)
        throw UsageError("--connectivity must be 4 or 8");
    return static_cast<fmd::Connectivity>(c);
}

fmd::Optimizer parse_optimizer(const std::string& name)
{
    if (name == "adam")
        return fmd::Optimizer::Adam;
    if (name == "sgd")
        return fmd::Optimizer::Sgd;
    throw UsageError("--optimizer must be adam or sgd");
}

std::vector<int> layer_sizes(int inputs, const std::vector<int>& hidden)
{
    std::vector<int> sizes{inputs};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    return sizes;
}

struct CommonOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

// ---------------------------------------------------------------- synth

struct SynthOptions {
    std::string map;
    std::string heights = "poly";
    int connectivity = 4;
    std::string out;
    std::string cells;
};

int run_synth(const SynthOptions& o)
{
    const auto h = fmd::parse_height_function(o.heights);
    const auto map = fmd::load_movingai_map_file(o.map);
    const auto grid = fmd::grid_to_directed_graph(map, h, to_connectivity(o.connectivity));
    const std::string cells = o.cells.empty() ? o.out + ".cells.tsv" : o.cells;
    {
        auto out = open_output(o.out);
        fmd::write_graph_tsv(out, grid.graph);
    }
    {
        auto out = open_output(cells);
        fmd::write_cells_tsv(out, grid);
    }
    write_manifest(o.out, "synth",
                   {{"map", o.map}, {"heights", o.heights}, {"connectivity", o.connectivity}},
                   {{"graph", o.out}, {"cells", cells}, {"vertices", grid.graph.vertex_count()},
                    {"edges", grid.graph.edge_count()}});
    std::cout << "vertices=" << grid.graph.vertex_count() << " edges=" << grid.graph.edge_count() << '\n';
    return 0;
}

// ---------------------------------------------------------------- embed

struct EmbedOptions {
    std::string graph;
    fmd::EmbedConfig cfg;
    bool no_enhancements = false;
    std::string out;
};

int run_embed(EmbedOptions o, const CommonOptions& common)
{
    o.cfg.seed = common.seed;
    o.cfg.enhancements = !o.no_enhancements;
    try {
        o.cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto g = fmd::read_graph_tsv_file(o.graph);
    const auto emb = fmd::embed_average_distances(g, o.cfg);
    fmd::write_embedding_files(o.out, emb);
    write_manifest(o.out, "embed",
                   {{"graph", o.graph},
                    {"k_max", o.cfg.k_max},
                    {"epsilon", o.cfg.epsilon},
                    {"pivot_iters", o.cfg.pivot_iters},
                    {"enhancements", o.cfg.enhancements},
                    {"seed", o.cfg.seed}},
                   {{"embedding", o.out}, {"sidecar", o.out + ".json"}, {"k", emb.k}});
    std::cout << "k=" << emb.k << " columns=" << emb.coords.cols()
              << " average_distance_calls=" << emb.stats.average_distance_calls << '\n';
    return 0;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
    std::string graph;
    std::string embedding;
    int degree = 2;
    double lambda = 1e-3;
    std::size_t min_samples = 0;
    int max_sweeps = 20000;
    double tol = 1e-9;
    std::string out;
    std::string embedding_out;
};

int run_fit(const FitOptions& o, const CommonOptions& common)
{
    const auto g = fmd::read_graph_tsv_file(o.graph);
    auto emb = fmd::read_embedding_files(o.embedding);
    if (static_cast<std::size_t>(emb.coords.rows()) != g.vertex_count())
        throw UsageError("embedding has " + std::to_string(emb.coords.rows()) + " rows but the graph has "
                         + std::to_string(g.vertex_count()) + " vertices");
    fmd::PotentialFitConfig cfg;
    cfg.degree = o.degree;
    cfg.lambda = o.lambda;
    cfg.min_samples = o.min_samples;
    cfg.seed = common.seed;
    cfg.jobs = common.jobs;
    cfg.lasso.max_sweeps = o.max_sweeps;
    cfg.lasso.tol = o.tol;
    const auto model = fmd::fit_potential(g, emb, cfg);
    write_json(o.out, fmd::to_json(model));
    json outputs{{"model", o.out}, {"M", model.size()}, {"training", model.training}};
    if (!o.embedding_out.empty()) {
        fmd::assign_last_coordinate(emb, model);
        fmd::write_embedding_files(o.embedding_out, emb);
        outputs["embedding"] = o.embedding_out;
    }
    write_manifest(o.out, "fit",
                   {{"graph", o.graph},
                    {"embedding", o.embedding},
                    {"degree", o.degree},
                    {"lambda", o.lambda},
                    {"min_samples", o.min_samples},
                    {"max_sweeps", o.max_sweeps},
                    {"tol", o.tol},
                    {"seed", common.seed},
                    {"jobs", common.jobs}},
                   outputs);
    std::cout << "M=" << model.size() << " samples=" << model.training["samples"]
              << " converged=" << model.training["converged"] << '\n';
    return 0;
}

// ---------------------------------------------------------------- fit-nn

struct FitNnOptions {
    std::string graph;
    std::string embedding;
    std::string cells;
    std::string mode = "pair-embedding";
    std::string hidden = "1000,500";
    std::size_t roots = 0;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 20;
    std::string optimizer = "adam";
    std::string out;
};

int run_fit_nn(const FitNnOptions& o, const CommonOptions& common)
{
    const auto mode = fmd::parse_nn_mode(o.mode);
    const auto g = fmd::read_graph_tsv_file(o.graph);
    const auto emb = fmd::read_embedding_files(o.embedding);
    std::vector<fmd::Cell> cells;
    if (mode == fmd::NnMode::PairGrid) {
        if (o.cells.empty())
            throw UsageError("--cells is required for the pair-grid mode");
        cells = fmd::read_cells_tsv_file(o.cells).cells;
    }
    std::size_t roots = o.roots;
    if (roots == 0) {
        std::vector<fmd::VertexId> pivots;
        for (const auto& p : emb.pivots) {
            pivots.push_back(p.a);
            pivots.push_back(p.b);
        }
        std::sort(pivots.begin(), pivots.end());
        roots = std::max<std::size_t>(1, static_cast<std::size_t>(std::unique(pivots.begin(), pivots.end()) - pivots.begin()));
    }
    const auto samples = fmd::sample_tree_training_data(g, roots, common.seed, common.jobs);
    const auto data = fmd::make_nn_data(mode, samples, emb, cells.empty() ? nullptr : &cells);
    auto model = fmd::MlpModel::create(layer_sizes(static_cast<int>(data.first.rows()), parse_list<int>(o.hidden)),
                                       mode, common.seed);
    fmd::NnTrainConfig train;
    train.learning_rate = o.learning_rate;
    train.batch_size = o.batch_size;
    train.epochs = o.epochs;
    train.seed = common.seed;
    train.optimizer = parse_optimizer(o.optimizer);
    const auto report = fmd::mlp_train(model, data, train);
    write_json(o.out, fmd::to_json(model));
    write_manifest(o.out, "fit-nn",
                   {{"graph", o.graph},
                    {"embedding", o.embedding},
                    {"cells", o.cells},
                    {"mode", o.mode},
                    {"layer_sizes", model.layer_sizes()},
                    {"roots", roots},
                    {"learning_rate", o.learning_rate},
                    {"batch_size", o.batch_size},
                    {"epochs", o.epochs},
                    {"optimizer", o.optimizer},
                    {"seed", common.seed},
                    {"jobs", common.jobs}},
                   {{"model", o.out}, {"samples", samples.size()}, {"epoch_loss", report.epoch_loss}});
    std::cout << "samples=" << samples.size() << " final_loss=" << report.epoch_loss.back() << '\n';
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string graph;
    std::string embedding;
    std::string model;
    std::string nn;
    std::string cells;
    bool zero_potential = false;
    std::size_t samples = 100000;
    std::size_t source_pool = 1000;
    std::string map_id = "graph";
    std::string heights = "-";
    std::string out;
};

int run_eval(const EvalOptions& o, const CommonOptions& common)
{
    if (!o.model.empty() + !o.nn.empty() + o.zero_potential > 1)
        throw UsageError("--model, --nn and --zero-potential are mutually exclusive");
    const auto g = fmd::read_graph_tsv_file(o.graph);
    auto emb = fmd::read_embedding_files(o.embedding);
    if (static_cast<std::size_t>(emb.coords.rows()) != g.vertex_count())
        throw UsageError("embedding and graph disagree on the vertex count");

    fmd::SamplingOptions sampling;
    sampling.pairs = o.samples;
    sampling.source_pool = o.source_pool;
    sampling.seed = common.seed;
    sampling.jobs = common.jobs;
    const auto truth = fmd::sample_distances(g, sampling);

    fmd::EvalReport report;
    report.map = o.map_id;
    report.heights = o.heights;
    report.seed = common.seed;
    report.samples = truth.size();
    report.k = emb.k + 1;
    std::string estimator = "embedding";
    if (o.zero_potential) {
        emb.potential().setZero();
        estimator = "zero-potential";
    } else if (!o.model.empty()) {
        const auto model = fmd::polynomial_model_from_json(read_json_file(o.model));
        fmd::assign_last_coordinate(emb, model);
        report.method = fmd::Method::FastMapDLasso;
        report.degree = model.degree;
        estimator = "polynomial";
    }
    if (!o.nn.empty()) {
        const auto model = fmd::mlp_model_from_json(read_json_file(o.nn));
        std::vector<fmd::Cell> cells;
        if (model.mode == fmd::NnMode::PairGrid) {
            if (o.cells.empty())
                throw UsageError("--cells is required for a pair-grid network");
            cells = fmd::read_cells_tsv_file(o.cells).cells;
        }
        const auto* cell_ptr = cells.empty() ? nullptr : &cells;
        report.method = model.mode == fmd::NnMode::PairGrid ? fmd::Method::DirectNn : fmd::Method::FastMapDNn;
        report.nrmse = fmd::nrmse(truth, [&](fmd::VertexId i, fmd::VertexId j) {
            return fmd::nn_distance_estimate(model, emb, cell_ptr, i, j);
        });
        estimator = std::string("nn-") + std::string(fmd::to_string(model.mode));
    } else {
        report.nrmse = fmd::nrmse(truth, emb);
    }

    std::cout.precision(17);
    std::cout << "nrmse=" << report.nrmse << " N=" << report.samples << '\n';
    if (!o.out.empty()) {
        {
            auto out = open_output(o.out);
            fmd::write_reports_csv(out, {report});
        }
        write_manifest(o.out, "eval",
                       {{"graph", o.graph},
                        {"embedding", o.embedding},
                        {"model", o.model},
                        {"nn", o.nn},
                        {"estimator", estimator},
                        {"samples", o.samples},
                        {"source_pool", o.source_pool},
                        {"seed", common.seed},
                        {"jobs", common.jobs}},
                       {{"report", o.out}, {"nrmse", report.nrmse}});
    }
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    std::string map;
    std::string graph;
    std::string cells;
    std::string heights = "poly";
    int connectivity = 4;
    std::string dims = "4,8,16";
    std::string degrees = "2";
    std::string seeds; ///< defaults to the global --seed
    std::string methods = "fastmap,fastmapd-lasso";
    std::size_t samples = 100000;
    std::size_t source_pool = 1000;
    double lambda = 1e-3;
    double epsilon = 1e-4;
    int pivot_iters = 10;
    std::string nn_mode = "pair-embedding";
    std::string nn_hidden = "1000,500";
    std::string direct_hidden = "1000,500,200,200";
    int nn_epochs = 20;
    double nn_lr = 1e-3;
    int nn_batch = 256;
    std::string map_id;
    std::string out;
};

int run_sweep(const SweepOptions& o, const CommonOptions& common)
{
    if (o.map.empty() == o.graph.empty())
        throw UsageError("exactly one of --map or --graph is required");
    fmd::SweepConfig cfg;
    cfg.dimensions = parse_list<int>(o.dims);
    cfg.degrees = parse_list<int>(o.degrees);
    cfg.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{common.seed} : parse_list<std::uint64_t>(o.seeds);
    cfg.methods.clear();
    for (const auto& m : parse_list<std::string>(o.methods)) {
        try {
            cfg.methods.push_back(fmd::parse_method(m));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    cfg.eval_pairs = o.samples;
    cfg.source_pool = o.source_pool;
    cfg.lambda = o.lambda;
    cfg.epsilon = o.epsilon;
    cfg.pivot_iters = o.pivot_iters;
    cfg.nn_mode = fmd::parse_nn_mode(o.nn_mode);
    cfg.nn_hidden = parse_list<int>(o.nn_hidden);
    cfg.direct_nn_hidden = parse_list<int>(o.direct_hidden);
    cfg.nn_train.epochs = o.nn_epochs;
    cfg.nn_train.learning_rate = o.nn_lr;
    cfg.nn_train.batch_size = o.nn_batch;
    cfg.jobs = common.jobs;

    fmd::DirectedGraph g;
    std::vector<fmd::Cell> cells;
    if (!o.map.empty()) {
        const auto grid = fmd::grid_to_directed_graph(fmd::load_movingai_map_file(o.map),
                                                      fmd::parse_height_function(o.heights),
                                                      to_connectivity(o.connectivity));
        g = grid.graph;
        cells = grid.cells;
        cfg.heights = std::string(fmd::to_string(fmd::parse_height_function(o.heights)));
        cfg.map_id = o.map_id.empty() ? std::filesystem::path(o.map).stem().string() : o.map_id;
    } else {
        g = fmd::read_graph_tsv_file(o.graph);
        if (!o.cells.empty())
            cells = fmd::read_cells_tsv_file(o.cells).cells;
        cfg.heights = o.heights;
        cfg.map_id = o.map_id.empty() ? std::filesystem::path(o.graph).stem().string() : o.map_id;
    }
    if (!fmd::is_strongly_connected(g))
        throw fmd::ConnectivityError("graph not strongly connected: vertex "
                                         + std::to_string(fmd::first_disconnected_vertex(g))
                                         + " is not mutually reachable with vertex 0",
                                     fmd::first_disconnected_vertex(g));

    const auto reports = fmd::sweep(g, cfg, cells.empty() ? nullptr : &cells);
    {
        auto out = open_output(o.out);
        fmd::write_reports_csv(out, reports);
    }
    std::vector<std::string> method_names;
    for (auto m : cfg.methods)
        method_names.emplace_back(fmd::to_string(m));
    write_manifest(o.out, "sweep",
                   {{"map", o.map},
                    {"graph", o.graph},
                    {"cells", o.cells},
                    {"heights", cfg.heights},
                    {"connectivity", o.connectivity},
                    {"dimensions", cfg.dimensions},
                    {"degrees", cfg.degrees},
                    {"seeds", cfg.seeds},
                    {"methods", method_names},
                    {"samples", cfg.eval_pairs},
                    {"source_pool", cfg.source_pool},
                    {"lambda", cfg.lambda},
                    {"epsilon", cfg.epsilon},
                    {"pivot_iters", cfg.pivot_iters},
                    {"nn_mode", o.nn_mode},
                    {"nn_hidden", cfg.nn_hidden},
                    {"direct_nn_hidden", cfg.direct_nn_hidden},
                    {"nn_epochs", o.nn_epochs},
                    {"nn_learning_rate", o.nn_lr},
                    {"nn_batch", o.nn_batch},
                    {"jobs", common.jobs}},
                   {{"results", o.out}, {"rows", reports.size()}});
    fmd::write_reports_csv(std::cout, reports);
    return 0;
}

// ---------------------------------------------------------------- oracle-check

struct OracleOptions {
    std::string graph;
    std::size_t cap = fmd::kDefaultOracleCap;
    double tolerance = 1e-9;
};

int run_oracle_check(const OracleOptions& o)
{
    const auto g = fmd::read_graph_tsv_file(o.graph);
    const Eigen::MatrixXd oracle = fmd::all_pairs_oracle(g, o.cap);
    const bool connected = fmd::is_strongly_connected(g);
    const auto reversed = fmd::reverse_graph(g);
    double sssp_error = 0.0;
    double average_error = 0.0;
    for (fmd::VertexId r = 0; r < g.vertex_count(); ++r) {
        const auto tree = fmd::sssp(g, r);
        for (Eigen::Index v = 0; v < oracle.cols(); ++v) {
            const double a = tree.dist[v];
            const double b = oracle(r, v);
            if (fmd::is_reachable(a) != fmd::is_reachable(b))
                sssp_error = std::numeric_limits<double>::infinity();
            else if (fmd::is_reachable(a))
                sssp_error = std::max(sssp_error, std::abs(a - b));
        }
        if (connected) {
            const Eigen::VectorXd avg = fmd::average_distance(g, reversed, r);
            const Eigen::VectorXd expected = (oracle.row(r).transpose() + oracle.col(r)) / 2.0;
            average_error = std::max(average_error, (avg - expected).cwiseAbs().maxCoeff());
        }
    }
    std::cout << "vertices=" << g.vertex_count() << " strongly_connected=" << (connected ? "yes" : "no")
              << " max_sssp_error=" << sssp_error << " max_average_error=" << average_error << '\n';
    return sssp_error <= o.tolerance && average_error <= o.tolerance ? 0 : kExitComputation;
}

// ---------------------------------------------------------------- gen-map

struct GenMapOptions {
    int width = 64;
    int height = 64;
    double density = 0.2;
    std::string out;
};

int run_gen_map(const GenMapOptions& o, const CommonOptions& common)
{
    const auto map = fmd::random_obstacle_map(o.width, o.height, o.density, common.seed);
    auto out = open_output(o.out);
    out << fmd::to_movingai_text(map);
    std::cout << "passable=" << map.passable_count() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Directed-graph embedding into a potential field (FastMap-D)"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonOptions common;
    app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--jobs", common.jobs, "Worker threads (0 = all cores)")->capture_default_str();

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Directed graph from a MovingAI map and a height function");
    synth_cmd->add_option("--map", synth.map, "MovingAI .map file")->required();
    synth_cmd->add_option("--heights", synth.heights, "poly or exp")->check(CLI::IsMember({"poly", "polynomial", "exp", "exponential"}))->capture_default_str();
    synth_cmd->add_option("--connectivity", synth.connectivity, "4 or 8")->check(CLI::IsMember({4, 8}))->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output edge-list TSV")->required();
    synth_cmd->add_option("--cells", synth.cells, "Vertex-to-cell TSV (default <out>.cells.tsv)");

    EmbedOptions embed;
    auto* embed_cmd = app.add_subcommand("embed", "Embed average distances (phase one)");
    embed_cmd->add_option("--graph", embed.graph, "Edge-list TSV")->required();
    embed_cmd->add_option("--k-max", embed.cfg.k_max, "Upper bound on total dimensionality")->capture_default_str();
    embed_cmd->add_option("--epsilon", embed.cfg.epsilon, "Threshold on squared residual")->capture_default_str();
    embed_cmd->add_option("--pivot-iters", embed.cfg.pivot_iters, "Farthest-pair rounds")->capture_default_str();
    embed_cmd->add_flag("--no-enhancements", embed.no_enhancements, "Plain pseudocode: no clamping or fallbacks");
    embed_cmd->add_option("--out", embed.out, "Output embedding CSV (sidecar at <out>.json)")->required();

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the polynomial potential with LASSO (phase two)");
    fit_cmd->add_option("--graph", fit.graph)->required();
    fit_cmd->add_option("--embedding", fit.embedding)->required();
    fit_cmd->add_option("--degree", fit.degree)->check(CLI::NonNegativeNumber)->capture_default_str();
    fit_cmd->add_option("--lambda", fit.lambda, "L1 weight on standardized columns")->check(CLI::NonNegativeNumber)->capture_default_str();
    fit_cmd->add_option("--min-samples", fit.min_samples, "Training pairs wanted (0 = 10 M)")->capture_default_str();
    fit_cmd->add_option("--max-sweeps", fit.max_sweeps)->capture_default_str();
    fit_cmd->add_option("--tol", fit.tol)->capture_default_str();
    fit_cmd->add_option("--out", fit.out, "Output model JSON")->required();
    fit_cmd->add_option("--embedding-out", fit.embedding_out, "Also write the embedding with the potential column");

    FitNnOptions fit_nn;
    auto* fit_nn_cmd = app.add_subcommand("fit-nn", "Train a neural correction or direct-distance model");
    fit_nn_cmd->add_option("--graph", fit_nn.graph)->required();
    fit_nn_cmd->add_option("--embedding", fit_nn.embedding)->required();
    fit_nn_cmd->add_option("--cells", fit_nn.cells, "Vertex-to-cell TSV (pair-grid mode)");
    fit_nn_cmd->add_option("--mode", fit_nn.mode, "pair-embedding, potential or pair-grid")->check(CLI::IsMember({"pair-embedding", "pair-grid", "potential"}))->capture_default_str();
    fit_nn_cmd->add_option("--hidden", fit_nn.hidden, "Hidden layer sizes")->capture_default_str();
    fit_nn_cmd->add_option("--roots", fit_nn.roots, "Tree roots (0 = number of pivot vertices)")->capture_default_str();
    fit_nn_cmd->add_option("--lr", fit_nn.learning_rate)->capture_default_str();
    fit_nn_cmd->add_option("--batch", fit_nn.batch_size)->capture_default_str();
    fit_nn_cmd->add_option("--epochs", fit_nn.epochs)->capture_default_str();
    fit_nn_cmd->add_option("--optimizer", fit_nn.optimizer, "adam or sgd")->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
    fit_nn_cmd->add_option("--out", fit_nn.out, "Output model JSON")->required();

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "NRMSE of an embedding (optionally with a model)");
    eval_cmd->add_option("--graph", eval.graph)->required();
    eval_cmd->add_option("--embedding", eval.embedding)->required();
    eval_cmd->add_option("--model", eval.model, "Polynomial model JSON to assign the potential");
    eval_cmd->add_option("--nn", eval.nn, "Neural model JSON");
    eval_cmd->add_option("--cells", eval.cells, "Vertex-to-cell TSV (pair-grid networks)");
    eval_cmd->add_flag("--zero-potential", eval.zero_potential, "Evaluate with psi = 0");
    eval_cmd->add_option("--samples", eval.samples, "N sampled pairs")->check(CLI::PositiveNumber)->capture_default_str();
    eval_cmd->add_option("--source-pool", eval.source_pool, "Distinct sources (0 = unrestricted)")->capture_default_str();
    eval_cmd->add_option("--map-id", eval.map_id)->capture_default_str();
    eval_cmd->add_option("--heights", eval.heights)->capture_default_str();
    eval_cmd->add_option("--out", eval.out, "Report CSV");

    SweepOptions sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "FastMap vs FastMap-D over K, D and seeds");
    sweep_cmd->add_option("--map", sw.map, "MovingAI .map file");
    sweep_cmd->add_option("--graph", sw.graph, "Edge-list TSV");
    sweep_cmd->add_option("--cells", sw.cells, "Vertex-to-cell TSV for --graph");
    sweep_cmd->add_option("--heights", sw.heights, "poly or exp")->check(CLI::IsMember({"poly", "polynomial", "exp", "exponential"}))->capture_default_str();
    sweep_cmd->add_option("--connectivity", sw.connectivity, "4 or 8")->check(CLI::IsMember({4, 8}))->capture_default_str();
    sweep_cmd->add_option("--k", sw.dims, "Total dimensionalities")->capture_default_str();
    sweep_cmd->add_option("--degree", sw.degrees, "Polynomial degrees")->capture_default_str();
    sweep_cmd->add_option("--seeds", sw.seeds, "Seed list (default: --seed)");
    sweep_cmd->add_option("--methods", sw.methods, "fastmap,fastmapd-lasso,fastmapd-nn,direct-nn")->capture_default_str();
    sweep_cmd->add_option("--samples", sw.samples)->check(CLI::PositiveNumber)->capture_default_str();
    sweep_cmd->add_option("--source-pool", sw.source_pool)->capture_default_str();
    sweep_cmd->add_option("--lambda", sw.lambda)->check(CLI::NonNegativeNumber)->capture_default_str();
    sweep_cmd->add_option("--epsilon", sw.epsilon)->capture_default_str();
    sweep_cmd->add_option("--pivot-iters", sw.pivot_iters)->capture_default_str();
    sweep_cmd->add_option("--nn-mode", sw.nn_mode)->check(CLI::IsMember({"pair-embedding", "pair-grid", "potential"}))->capture_default_str();
    sweep_cmd->add_option("--nn-hidden", sw.nn_hidden)->capture_default_str();
    sweep_cmd->add_option("--direct-hidden", sw.direct_hidden)->capture_default_str();
    sweep_cmd->add_option("--nn-epochs", sw.nn_epochs)->capture_default_str();
    sweep_cmd->add_option("--nn-lr", sw.nn_lr)->capture_default_str();
    sweep_cmd->add_option("--nn-batch", sw.nn_batch)->capture_default_str();
    sweep_cmd->add_option("--map-id", sw.map_id);
    sweep_cmd->add_option("--out", sw.out, "Results CSV")->required();

    OracleOptions oracle;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare Dijkstra against Floyd-Warshall");
    oracle_cmd->add_option("--graph", oracle.graph)->required();
    oracle_cmd->add_option("--cap", oracle.cap)->capture_default_str();
    oracle_cmd->add_option("--tolerance", oracle.tolerance)->capture_default_str();

    GenMapOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-map", "Random-obstacle MovingAI map (largest region kept)");
    gen_cmd->add_option("--width", gen.width)->capture_default_str();
    gen_cmd->add_option("--height", gen.height)->capture_default_str();
    gen_cmd->add_option("--density", gen.density)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    gen_cmd->add_option("--out", gen.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*synth_cmd)
            return run_synth(synth);
        if (*embed_cmd)
            return run_embed(embed, common);
        if (*fit_cmd)
            return run_fit(fit, common);
        if (*fit_nn_cmd)
            return run_fit_nn(fit_nn, common);
        if (*eval_cmd)
            return run_eval(eval, common);
        if (*sweep_cmd)
            return run_sweep(sw, common);
        if (*oracle_cmd)
            return run_oracle_check(oracle);
        if (*gen_cmd)
            return run_gen_map(gen, common);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fmd::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed JSON: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitUsage;
}

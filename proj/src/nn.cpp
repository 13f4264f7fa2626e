#include "fastmapd/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "fastmapd/errors.hpp"
#include "fastmapd/parallel.hpp"
#include "fastmapd/shortest_paths.hpp"

namespace fmd {

NnMode parse_nn_mode(std::string_view name)
{
    if (name == "pair-embedding")
        return NnMode::PairEmbedding;
    if (name == "pair-grid")
        return NnMode::PairGrid;
    if (name == "potential")
        return NnMode::Potential;
    throw std::invalid_argument("unknown NN mode '" + std::string(name)
                                + "' (expected pair-embedding, pair-grid or potential)");
}

std::string_view to_string(NnMode mode)
{
    switch (mode) {
    case NnMode::PairEmbedding:
        return "pair-embedding";
    case NnMode::PairGrid:
        return "pair-grid";
    case NnMode::Potential:
        return "potential";
    }
    return "?";
}

MlpModel MlpModel::create(const std::vector<int>& layer_sizes, NnMode mode, std::uint64_t seed)
{
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("an MLP needs at least an input and an output layer");
    if (layer_sizes.back() != 1)
        throw std::invalid_argument("the output layer must have exactly one unit");
    for (int s : layer_sizes)
        if (s < 1)
            throw std::invalid_argument("layer sizes must be positive");

    MlpModel model;
    model.mode = mode;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
        Eigen::MatrixXd w(layer_sizes[l + 1], fan_in);
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                w(r, c) = normal(rng);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
    }
    model.input_shift = Eigen::VectorXd::Zero(layer_sizes.front());
    model.input_scale = Eigen::VectorXd::Ones(layer_sizes.front());
    return model;
}

std::vector<int> MlpModel::layer_sizes() const
{
    std::vector<int> sizes{input_size()};
    for (const auto& w : weights)
        sizes.push_back(static_cast<int>(w.rows()));
    return sizes;
}

std::size_t MlpModel::parameter_count() const
{
    std::size_t total = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        total += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return total;
}

Eigen::VectorXd MlpModel::flat_parameters() const
{
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.segment(at, weights[l].size()) = weights[l].reshaped();
        at += weights[l].size();
        flat.segment(at, biases[l].size()) = biases[l];
        at += biases[l].size();
    }
    return flat;
}

void MlpModel::set_flat_parameters(const Eigen::VectorXd& flat)
{
    if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
        throw std::invalid_argument("parameter vector has the wrong length");
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l].reshaped() = flat.segment(at, weights[l].size());
        at += weights[l].size();
        biases[l] = flat.segment(at, biases[l].size());
        at += biases[l].size();
    }
}

namespace {

struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations; ///< activations[0] = normalized input
};

Eigen::RowVectorXd forward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                           ForwardCache* cache)
{
    if (inputs.rows() != model.input_size())
        throw std::invalid_argument("input has " + std::to_string(inputs.rows()) + " features, model expects "
                                    + std::to_string(model.input_size()));
    if (model.input_shift.size() != inputs.rows() || model.input_scale.size() != inputs.rows())
        throw std::invalid_argument("input standardization does not match the input layer");
    Eigen::MatrixXd a = (inputs.colwise() - model.input_shift).array().colwise() / model.input_scale.array();
    if (cache)
        cache->activations.assign(1, a);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Eigen::MatrixXd z = model.weights[l] * a;
        z.colwise() += model.biases[l];
        if (l + 1 < model.weights.size())
            z = z.cwiseMax(0.0);
        a = std::move(z);
        if (cache)
            cache->activations.push_back(a);
    }
    return model.output_scale * a.row(0);
}

/// Adds d(loss)/d(params) given d(loss)/d(output) for every column.
void backward(const MlpModel& model, const ForwardCache& cache, const Eigen::RowVectorXd& output_grad,
              Eigen::VectorXd& gradient)
{
    const std::size_t layers = model.weights.size();
    std::vector<Eigen::Index> offsets(layers);
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = at;
        at += model.weights[l].size() + model.biases[l].size();
    }

    Eigen::MatrixXd delta = model.output_scale * output_grad;
    for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd& input = cache.activations[l];
        const Eigen::MatrixXd grad_w = delta * input.transpose();
        gradient.segment(offsets[l], grad_w.size()) += grad_w.reshaped();
        gradient.segment(offsets[l] + grad_w.size(), model.biases[l].size()) += delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = model.weights[l].transpose() * delta;
            delta = (input.array() > 0.0).select(back, 0.0);
        }
    }
}

NnData columns(const NnData& data, const std::vector<Eigen::Index>& order, Eigen::Index begin, Eigen::Index end)
{
    NnData batch;
    const Eigen::Index n = end - begin;
    batch.first.resize(data.first.rows(), n);
    if (data.second.size())
        batch.second.resize(data.second.rows(), n);
    batch.target.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const Eigen::Index src = order[static_cast<std::size_t>(begin + c)];
        batch.first.col(c) = data.first.col(src);
        if (data.second.size())
            batch.second.col(c) = data.second.col(src);
        batch.target[c] = data.target[src];
    }
    return batch;
}

} // namespace

double mlp_forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& input)
{
    return forward(model, input, nullptr)(0);
}

Eigen::RowVectorXd mlp_forward_batch(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs)
{
    return forward(model, inputs, nullptr);
}

double mlp_loss_and_gradient(const MlpModel& model, const NnData& data, Eigen::VectorXd* gradient)
{
    const Eigen::Index n = data.size();
    if (n == 0)
        throw std::invalid_argument("empty training data");
    const bool potential = model.mode == NnMode::Potential;
    if (potential && data.second.cols() != n)
        throw std::invalid_argument("potential-form data needs source and target features");

    ForwardCache first_cache;
    ForwardCache second_cache;
    const Eigen::RowVectorXd first_out = forward(model, data.first, gradient ? &first_cache : nullptr);
    Eigen::RowVectorXd prediction = first_out;
    Eigen::RowVectorXd second_out;
    if (potential) {
        second_out = forward(model, data.second, gradient ? &second_cache : nullptr);
        prediction = second_out - first_out;
    }
    const Eigen::RowVectorXd error = prediction - data.target.transpose();
    const double loss = error.squaredNorm() / static_cast<double>(n);

    if (gradient) {
        gradient->setZero(static_cast<Eigen::Index>(model.parameter_count()));
        const Eigen::RowVectorXd d_pred = 2.0 * error / static_cast<double>(n);
        if (potential) {
            backward(model, second_cache, d_pred, *gradient);
            backward(model, first_cache, -d_pred, *gradient);
        } else {
            backward(model, first_cache, d_pred, *gradient);
        }
    }
    return loss;
}

void NnTrainConfig::validate() const
{
    if (!(learning_rate >= 0.0))
        throw std::invalid_argument("learning rate must be non-negative");
    if (batch_size < 1 || epochs < 1)
        throw std::invalid_argument("batch size and epochs must be positive");
}

TrainReport mlp_train(MlpModel& model, const NnData& data, const NnTrainConfig& cfg)
{
    cfg.validate();
    const Eigen::Index n = data.size();
    if (n == 0)
        throw std::invalid_argument("empty training data");

    if (cfg.normalize) {
        // Both points of a pair live in the same coordinate space, so their statistics are pooled.
        const Eigen::Index rows = data.first.rows();
        const bool pair_layout = model.mode != NnMode::Potential && rows % 2 == 0;
        const Eigen::Index width = pair_layout ? rows / 2 : rows;
        Eigen::MatrixXd all;
        if (model.mode == NnMode::Potential) {
            all.resize(rows, 2 * n);
            all << data.first, data.second;
        } else if (pair_layout) {
            all.resize(width, 2 * n);
            all << data.first.topRows(width), data.first.bottomRows(width);
        } else {
            all = data.first;
        }
        const Eigen::VectorXd shift = all.rowwise().mean();
        const Eigen::MatrixXd centered = all.colwise() - shift;
        Eigen::VectorXd scale = (centered.rowwise().squaredNorm() / static_cast<double>(all.cols())).cwiseSqrt();
        for (Eigen::Index r = 0; r < scale.size(); ++r)
            if (!(scale[r] > 0.0))
                scale[r] = 1.0;
        model.input_shift = shift.replicate(rows / width, 1);
        model.input_scale = scale.replicate(rows / width, 1);
        const double target_rms = std::sqrt(data.target.squaredNorm() / static_cast<double>(n));
        model.output_scale = target_rms > 0.0 ? target_rms : 1.0;
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    Eigen::VectorXd params = model.flat_parameters();
    Eigen::VectorXd first_moment = Eigen::VectorXd::Zero(params.size());
    Eigen::VectorXd second_moment = Eigen::VectorXd::Zero(params.size());
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-8;
    long step = 0;

    TrainReport report;
    Eigen::VectorXd gradient;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double weighted_loss = 0.0;
        for (Eigen::Index begin = 0; begin < n; begin += cfg.batch_size) {
            const Eigen::Index end = std::min<Eigen::Index>(n, begin + cfg.batch_size);
            const NnData batch = columns(data, order, begin, end);
            const double loss = mlp_loss_and_gradient(model, batch, &gradient);
            if (!std::isfinite(loss) || !gradient.allFinite())
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1)
                                   + " (non-finite loss); lower the learning rate");
            weighted_loss += loss * static_cast<double>(end - begin);

            if (cfg.optimizer == Optimizer::Sgd) {
                params -= cfg.learning_rate * gradient;
            } else {
                ++step;
                first_moment = beta1 * first_moment + (1.0 - beta1) * gradient;
                second_moment = beta2 * second_moment + (1.0 - beta2) * gradient.cwiseAbs2();
                const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                params.array() -= cfg.learning_rate * (first_moment.array() / bias1)
                                  / ((second_moment.array() / bias2).sqrt() + adam_eps);
            }
            model.set_flat_parameters(params);
        }
        report.epoch_loss.push_back(weighted_loss / static_cast<double>(n));
    }
    return report;
}

std::vector<TreeSample> sample_tree_training_data(const DirectedGraph& g, std::size_t roots, std::uint64_t seed,
                                                  unsigned jobs)
{
    const std::size_t n = g.vertex_count();
    if (roots == 0 || n == 0)
        throw std::invalid_argument("tree sampling needs at least one root and one vertex");
    roots = std::min(roots, n);

    std::vector<VertexId> candidates(n);
    std::iota(candidates.begin(), candidates.end(), VertexId{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < roots; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
    }

    const DirectedGraph reversed = reverse_graph(g);
    std::vector<TreeSample> samples(roots * n);
    parallel_for(roots, jobs, [&](std::size_t r) {
        const VertexId root = candidates[r];
        Eigen::VectorXd forward;
        const Eigen::VectorXd avg = average_distance(g, reversed, root, forward);
        for (std::size_t v = 0; v < n; ++v)
            samples[r * n + v] = {root, static_cast<VertexId>(v), forward[static_cast<Eigen::Index>(v)],
                                  avg[static_cast<Eigen::Index>(v)]};
    });
    return samples;
}

namespace {

Eigen::VectorXd point_features(NnMode mode, const Embedding& emb, const std::vector<Cell>* cells, VertexId v)
{
    if (mode == NnMode::PairGrid) {
        if (!cells || v >= cells->size())
            throw std::invalid_argument("grid-coordinate features need the vertex-to-cell mapping");
        return Eigen::Vector2d((*cells)[v].x, (*cells)[v].y);
    }
    return emb.coords.row(v).head(emb.k).transpose();
}

} // namespace

Eigen::VectorXd pair_features(NnMode mode, const Embedding& emb, const std::vector<Cell>* cells, VertexId i,
                              VertexId j)
{
    if (mode == NnMode::Potential)
        throw std::invalid_argument("potential-form networks take one point at a time");
    const Eigen::VectorXd a = point_features(mode, emb, cells, i);
    const Eigen::VectorXd b = point_features(mode, emb, cells, j);
    Eigen::VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
}

NnData make_nn_data(NnMode mode, const std::vector<TreeSample>& samples, const Embedding& emb,
                    const std::vector<Cell>* cells)
{
    NnData data;
    const auto n = static_cast<Eigen::Index>(samples.size());
    data.target.resize(n);
    if (mode == NnMode::Potential) {
        data.first.resize(emb.k, n);
        data.second.resize(emb.k, n);
    } else {
        const Eigen::Index width = mode == NnMode::PairGrid ? 4 : 2 * emb.k;
        data.first.resize(width, n);
    }
    for (Eigen::Index s = 0; s < n; ++s) {
        const TreeSample& sample = samples[static_cast<std::size_t>(s)];
        if (mode == NnMode::Potential) {
            data.first.col(s) = point_features(mode, emb, cells, sample.source);
            data.second.col(s) = point_features(mode, emb, cells, sample.target);
        } else {
            data.first.col(s) = pair_features(mode, emb, cells, sample.source, sample.target);
        }
        data.target[s] = mode == NnMode::PairGrid ? sample.distance : sample.correction();
    }
    return data;
}

double predict_correction(const MlpModel& model, NnMode mode, const Embedding& emb, const std::vector<Cell>* cells,
                          VertexId i, VertexId j)
{
    if (model.mode != mode)
        throw std::invalid_argument("model was trained for mode '" + std::string(to_string(model.mode))
                                    + "', not '" + std::string(to_string(mode)) + "'");
    if (mode == NnMode::Potential) {
        const Eigen::VectorXd pi = point_features(mode, emb, cells, i);
        const Eigen::VectorXd pj = point_features(mode, emb, cells, j);
        return mlp_forward(model, pj) - mlp_forward(model, pi);
    }
    return mlp_forward(model, pair_features(mode, emb, cells, i, j));
}

double nn_distance_estimate(const MlpModel& model, const Embedding& emb, const std::vector<Cell>* cells, VertexId i,
                            VertexId j)
{
    const double prediction = predict_correction(model, model.mode, emb, cells, i, j);
    if (model.mode == NnMode::PairGrid)
        return prediction;
    const double euclidean = (emb.coords.row(j).head(emb.k) - emb.coords.row(i).head(emb.k)).norm();
    return euclidean + prediction;
}

nlohmann::json to_json(const MlpModel& model)
{
    const Eigen::VectorXd flat = model.flat_parameters();
    return {
        {"type", "mlp"},
        {"mode", to_string(model.mode)},
        {"layer_sizes", model.layer_sizes()},
        {"input_shift", std::vector<double>(model.input_shift.data(), model.input_shift.data() + model.input_shift.size())},
        {"input_scale", std::vector<double>(model.input_scale.data(), model.input_scale.data() + model.input_scale.size())},
        {"output_scale", model.output_scale},
        {"parameters", std::vector<double>(flat.data(), flat.data() + flat.size())},
    };
}

MlpModel mlp_model_from_json(const nlohmann::json& j)
{
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    MlpModel model = MlpModel::create(sizes, parse_nn_mode(j.at("mode").get<std::string>()), 0);
    const auto params = j.at("parameters").get<std::vector<double>>();
    model.set_flat_parameters(Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size())));
    const auto shift = j.at("input_shift").get<std::vector<double>>();
    const auto scale = j.at("input_scale").get<std::vector<double>>();
    if (shift.size() != static_cast<std::size_t>(sizes.front()) || scale.size() != shift.size())
        throw std::invalid_argument("input normalization has the wrong width");
    model.input_shift = Eigen::Map<const Eigen::VectorXd>(shift.data(), static_cast<Eigen::Index>(shift.size()));
    model.input_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    model.output_scale = j.at("output_scale").get<double>();
    return model;
}

} // namespace fmd

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "fastmapd/embedder.hpp"
#include "fastmapd/graph.hpp"
#include "fastmapd/grid.hpp"

namespace fmd {

/// What the network consumes and predicts.
///  PairEmbedding: [p_i, p_j] (2k inputs) -> correction d - avg
///  PairGrid:      [x_i, y_i, x_j, y_j]   -> distance d (direct baseline)
///  Potential:     p (k inputs) -> psi, correction = psi(p_j) - psi(p_i)
enum class NnMode { PairEmbedding, PairGrid, Potential };

NnMode parse_nn_mode(std::string_view name);
std::string_view to_string(NnMode mode);

/// Fully connected regressor: rectifier on hidden layers, identity output.
/// Inputs are standardized with (x - input_shift) / input_scale and the output
/// is multiplied by output_scale; both default to the identity.
struct MlpModel {
    std::vector<Eigen::MatrixXd> weights; ///< layer l maps size[l] -> size[l + 1]
    std::vector<Eigen::VectorXd> biases;
    NnMode mode = NnMode::PairEmbedding;
    Eigen::VectorXd input_shift;
    Eigen::VectorXd input_scale;
    double output_scale = 1.0;

    /// He-scaled normal weights, zero biases.
    static MlpModel create(const std::vector<int>& layer_sizes, NnMode mode, std::uint64_t seed);

    std::vector<int> layer_sizes() const;
    int input_size() const { return static_cast<int>(weights.front().cols()); }
    std::size_t parameter_count() const;

    Eigen::VectorXd flat_parameters() const;
    void set_flat_parameters(const Eigen::VectorXd& flat);
};

/// Forward pass for one input vector. Throws std::invalid_argument on a size
/// mismatch.
double mlp_forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& input);

/// Column-per-sample batch forward pass.
Eigen::RowVectorXd mlp_forward_batch(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// Training data, one column per sample. For the Potential mode `first` holds
/// source features and `second` target features; the prediction is
/// f(second) - f(first). Pair modes use `first` only.
struct NnData {
    Eigen::MatrixXd first;
    Eigen::MatrixXd second;
    Eigen::VectorXd target;

    Eigen::Index size() const { return target.size(); }
};

/// Mean squared error and its gradient w.r.t. the flattened parameters (same
/// layout as MlpModel::flat_parameters) over the given sample columns.
double mlp_loss_and_gradient(const MlpModel& model, const NnData& data, Eigen::VectorXd* gradient = nullptr);

enum class Optimizer { Adam, Sgd };

struct NnTrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 20;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::Adam;
    bool normalize = true; ///< fit input/output scaling from the data before training

    void validate() const;
};

struct TrainReport {
    std::vector<double> epoch_loss; ///< training MSE in target units
};

/// Minibatch gradient descent on mean squared error; deterministic given the
/// seed. Throws NumericError when the loss becomes non-finite.
TrainReport mlp_train(MlpModel& model, const NnData& data, const NnTrainConfig& cfg);

struct TreeSample {
    VertexId source;
    VertexId target;
    double distance; ///< d_G(source, target)
    double average;  ///< (d_G(source, target) + d_G(target, source)) / 2
    double correction() const { return distance - average; }
};

/// `roots` random distinct roots (seeded); every vertex of each root's tree
/// becomes a sample with the root as source, so roots * |V| samples in total.
std::vector<TreeSample> sample_tree_training_data(const DirectedGraph& g, std::size_t roots, std::uint64_t seed,
                                                  unsigned jobs = 1);

/// Builds network inputs/targets for `mode`. `cells` is required for PairGrid.
NnData make_nn_data(NnMode mode, const std::vector<TreeSample>& samples, const Embedding& emb,
                    const std::vector<Cell>* cells = nullptr);

/// Features for a single pair under `mode`.
Eigen::VectorXd pair_features(NnMode mode, const Embedding& emb, const std::vector<Cell>* cells, VertexId i,
                              VertexId j);

/// Model output for the pair (i, j): a correction for PairEmbedding/Potential,
/// a full distance for PairGrid. Throws std::invalid_argument when the model was
/// trained for another mode or input width.
double predict_correction(const MlpModel& model, NnMode mode, const Embedding& emb, const std::vector<Cell>* cells,
                          VertexId i, VertexId j);

/// Estimated directed distance: Euclidean part + predicted correction, or the
/// direct prediction for PairGrid.
double nn_distance_estimate(const MlpModel& model, const Embedding& emb, const std::vector<Cell>* cells, VertexId i,
                            VertexId j);

nlohmann::json to_json(const MlpModel& model);
MlpModel mlp_model_from_json(const nlohmann::json& j);

} // namespace fmd

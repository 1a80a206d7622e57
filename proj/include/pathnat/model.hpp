#pragma once
// Naturalness model.
//
//   item code  = mean_j ReLU(W_j x_j + b_j)          (one FC layer per feature)
//   path code  = h_{2n-1} of a single-layer LSTM over the item codes
//   score m    = w . path code + b                    (shared across both paths)
//   P(first)   = e^{m1} / (e^{m1} + e^{m2}) = sigmoid(m1 - m2)
//
// Training minimizes the mean pairwise negative log-likelihood with Adam.
// Gradients are exact reverse-mode derivatives written out by hand below.

#include "pathnat/choice.hpp"
#include "pathnat/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pathnat {

inline constexpr std::string_view kToolVersion = "pathnat 1.0.0";

struct ModelShape {
    FeatureLayout layout;
    std::size_t feature_width = 64;  // l_f
    std::size_t code_length = 10;    // h

    bool operator==(const ModelShape&) const = default;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;
using VectorView = Eigen::Map<Eigen::VectorXd>;
using ConstVectorView = Eigen::Map<const Eigen::VectorXd>;

/// All weights in one flat buffer, tensors laid out in declaration order:
///   vertex_w[j], vertex_b[j] for each vertex feature,
///   edge_w[j], edge_b[j] for each edge feature,
///   lstm_wx (4h x l_f), lstm_wh (4h x h), lstm_b (4h),
///   score_w (h), score_b (1).
/// LSTM gate blocks are ordered input, forget, output, candidate.
/// Gradients use the same type.
class ModelParameters {
public:
    struct Tensor {
        std::string name;
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::size_t offset = 0;
    };

    ModelParameters() = default;
    explicit ModelParameters(const ModelShape& shape);  // all zeros

    /// Uniform(+-sqrt(6 / (fan_in + fan_out))) matrices, zero biases except
    /// the forget gate bias, which starts at 1.
    static ModelParameters initialized(const ModelShape& shape, std::uint64_t seed);

    const ModelShape& shape() const { return shape_; }
    const std::vector<Tensor>& tensors() const { return tensors_; }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    std::size_t size() const { return data_.size(); }

    MatrixView tensor(std::size_t index);
    ConstMatrixView tensor(std::size_t index) const;

    MatrixView vertex_weight(std::size_t j) { return tensor(2 * j); }
    VectorView vertex_bias(std::size_t j) { return vector(2 * j + 1); }
    MatrixView edge_weight(std::size_t j) { return tensor(edge_base() + 2 * j); }
    VectorView edge_bias(std::size_t j) { return vector(edge_base() + 2 * j + 1); }
    MatrixView lstm_input_weight() { return tensor(lstm_base()); }
    MatrixView lstm_recurrent_weight() { return tensor(lstm_base() + 1); }
    VectorView lstm_bias() { return vector(lstm_base() + 2); }
    VectorView score_weight() { return vector(lstm_base() + 3); }
    double& score_bias() { return data_[tensors_[lstm_base() + 4].offset]; }

    ConstMatrixView vertex_weight(std::size_t j) const { return tensor(2 * j); }
    ConstVectorView vertex_bias(std::size_t j) const { return vector(2 * j + 1); }
    ConstMatrixView edge_weight(std::size_t j) const { return tensor(edge_base() + 2 * j); }
    ConstVectorView edge_bias(std::size_t j) const { return vector(edge_base() + 2 * j + 1); }
    ConstMatrixView lstm_input_weight() const { return tensor(lstm_base()); }
    ConstMatrixView lstm_recurrent_weight() const { return tensor(lstm_base() + 1); }
    ConstVectorView lstm_bias() const { return vector(lstm_base() + 2); }
    ConstVectorView score_weight() const { return vector(lstm_base() + 3); }
    double score_bias() const { return data_[tensors_[lstm_base() + 4].offset]; }

    bool operator==(const ModelParameters& o) const { return shape_ == o.shape_ && data_ == o.data_; }

private:
    std::size_t edge_base() const { return 2 * shape_.layout.vertex_dims.size(); }
    std::size_t lstm_base() const { return edge_base() + 2 * shape_.layout.edge_dims.size(); }
    VectorView vector(std::size_t index);
    ConstVectorView vector(std::size_t index) const;

    ModelShape shape_;
    std::vector<Tensor> tensors_;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Forward

Eigen::VectorXd encode_item(const PathItem& item, const ModelParameters& params);
Eigen::VectorXd encode_path(const FeaturizedPath& path, const ModelParameters& params);
double score_path(const FeaturizedPath& path, const ModelParameters& params);

/// sigmoid(m1 - m2), evaluated without overflow.
double predict_pair(double m1, double m2);
double predict_pair(const FeaturizedPath& a, const FeaturizedPath& b, const ModelParameters& params);

/// -log P(label) for a score pair, computed as a softplus of the difference.
double pair_nll(double m1, double m2, Choice label);

/// Mean -log of the probability assigned to each observed choice, where
/// predictions[i] is P(first).
double nll_loss(std::span<const double> predictions, std::span<const Choice> labels);

// ---------------------------------------------------------------------------
// Training data

/// Indices into a path collection plus the observed choice.
struct PairExample {
    std::size_t first = 0;
    std::size_t second = 0;
    Choice label = Choice::first;
};

/// Mean NLL over the batch and its exact gradient (same shape as params).
struct LossAndGradient {
    double loss = 0.0;
    ModelParameters gradient;
};
LossAndGradient backward(std::span<const FeaturizedPath> paths, std::span<const PairExample> batch,
                         const ModelParameters& params);
double batch_loss(std::span<const FeaturizedPath> paths, std::span<const PairExample> batch,
                  const ModelParameters& params);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamMoments {
    std::vector<double> first;
    std::vector<double> second;
};

/// One bias-corrected Adam update; t is the 1-based step number.
void adam_step(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
               std::size_t t, const AdamConfig& config);

struct TrainingConfig {
    AdamConfig adam;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    std::size_t feature_width = 64;
    std::size_t code_length = 10;
    std::size_t embedding_dim = 0;  // 0: raw table dimension
    FeatureMask mask = FeatureMask::all();

    /// Canonical JSON text, used for checkpoints and artifact headers.
    std::string to_json() const;
    static TrainingConfig from_json(std::string_view text);
    std::uint64_t hash() const;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double heldout_accuracy = -1.0;  // negative when no held-out set was given
};

struct TrainingResult {
    ModelParameters params;
    std::vector<EpochLog> log;
};

class TrainingDiverged : public Error {
public:
    TrainingDiverged(std::size_t epoch, double loss);
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

/// Deterministic for a given config: fixed shuffle stream and accumulation order.
TrainingResult train(std::span<const FeaturizedPath> paths, std::span<const PairExample> train_pairs,
                     const FeatureLayout& layout, const TrainingConfig& config,
                     std::span<const PairExample> heldout = {});

// ---------------------------------------------------------------------------
// Evaluation

struct ScoredPair {
    double first = 0.0;
    double second = 0.0;
    Choice label = Choice::first;
};

/// Fraction of pairs whose higher-scored path is the labelled one; ties count half.
double pairwise_accuracy(std::span<const ScoredPair> pairs);

double evaluate_accuracy(std::span<const FeaturizedPath> paths, std::span<const PairExample> pairs,
                         const ModelParameters& params);

// ---------------------------------------------------------------------------
// Checkpoints

struct Checkpoint {
    TrainingConfig config;
    ModelParameters params;
};

/// Binary: "PNATCKPT", u32 version, u64 + JSON header (config, shape, tool
/// version, config hash), u32 tensor count, then per tensor u32 name length,
/// name, u64 rows, u64 cols and little-endian float64 values.
void save_checkpoint(std::ostream& out, const TrainingConfig& config, const ModelParameters& params);
void save_checkpoint(const std::filesystem::path& file, const TrainingConfig& config, const ModelParameters& params);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace pathnat

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dnp/molgraph.hpp"

namespace dnpgcn {

using Matrix = Eigen::MatrixXd;

enum class NormMode { Batch, None };

std::string_view to_string(NormMode mode);
NormMode parse_norm_mode(std::string_view name);

struct ModelConfig {
  int width = 128;
  int depth = 2;
  int node_features = kResidueFeatureWidth;
  int edge_features = static_cast<int>(kEdgeFeatureWidth);
  int classes = 2;
  NormMode norm = NormMode::Batch;
  bool edge_in_node_update = true;
  bool edge_update = true;
  bool edge_in_readout = true;

  int readout_width() const { return (depth + 1) * width; }
  /// Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// y = x W + b, W is in x out, b is 1 x out.
struct Linear {
  Matrix W, b;
};

struct BatchNorm {
  Matrix gamma, beta;                // trainable, 1 x F
  Matrix running_mean, running_var;  // buffers, 1 x F
};

/// fc1 -> [bn1] -> relu -> fc2 -> [bn2] -> relu
struct Mlp {
  Linear fc1, fc2;
  BatchNorm bn1, bn2;
};

struct ModelParams {
  Linear node_in, edge_in;
  std::vector<Mlp> node_mlp;  // one per layer
  std::vector<Mlp> edge_mlp;  // one per layer, empty when edge updates are off
  Linear cls1, cls2;          // readout -> F -> K, relu between
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

/// He-uniform weights, zero biases, unit scale, zero shift; seeded.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);
/// Same shapes as `cfg` would produce, all zeros (gradient accumulator).
ModelParams zeros_like(const ModelConfig& cfg);

/// Trainable tensors in a fixed order with stable names. Batch-norm scale and
/// shift are listed only in batch mode.
std::vector<std::pair<std::string, Matrix*>> parameter_refs(ModelParams& p, const ModelConfig& cfg);
std::vector<std::pair<std::string, const Matrix*>> parameter_refs(const ModelParams& p, const ModelConfig& cfg);
/// Running statistics (batch mode only).
std::vector<std::pair<std::string, Matrix*>> buffer_refs(ModelParams& p, const ModelConfig& cfg);

/// Disjoint union of graphs. Edge k joins src[k] and dst[k] (global indices).
struct GraphBatch {
  Matrix node_x;  // N x C
  Matrix edge_x;  // M x 4
  std::vector<int> src, dst;
  std::vector<int> node_graph, edge_graph;
  int graph_count = 0;
};

GraphBatch make_batch(std::span<const MolGraph* const> graphs);
GraphBatch make_batch(const MolGraph& g);

enum class Phase { Train, Eval };

struct BatchNormCache {
  Eigen::RowVectorXd mean, var, inv_std;
  Matrix xhat;
};

struct MlpCache {
  Matrix x, y1, a1, y2, out;
  BatchNormCache bn1, bn2;
};

struct ForwardTrace {
  Phase phase = Phase::Eval;
  std::vector<Matrix> h, e;        // h[k]: N x F, e[k]: M x F, k = 0..L
  std::vector<MlpCache> node, edge;
  Matrix readout;                  // G x (L+1)F
  Matrix hidden_pre, hidden;       // classifier hidden layer, G x F
  Matrix logits;                   // G x K
};

/// Linear projections of raw node and edge features to width F.
std::pair<Matrix, Matrix> project_inputs(const GraphBatch& batch, const ModelParams& p, const ModelConfig& cfg);

/// One message-passing layer (0-based `layer`), parallel update from the
/// previous layer's values. `node_cache`/`edge_cache` may be null.
std::pair<Matrix, Matrix> conv_layer(const Matrix& h, const Matrix& e, const GraphBatch& batch, const ModelParams& p,
                                     const ModelConfig& cfg, int layer, Phase phase, MlpCache* node_cache = nullptr,
                                     MlpCache* edge_cache = nullptr);

/// Per-graph concatenation over k of node sums (plus edge sums when enabled).
Matrix readout(const std::vector<Matrix>& h, const std::vector<Matrix>& e, const GraphBatch& batch,
               const ModelConfig& cfg);

/// Classifier MLP on readout rows.
Matrix classify(const Matrix& hg, const ModelParams& p);

ForwardTrace forward(const GraphBatch& batch, const ModelParams& p, const ModelConfig& cfg, Phase phase);

/// -w[label] log softmax(logits)[label], computed through log-sum-exp.
double loss_weighted_ce(const Eigen::RowVectorXd& logits, int label, std::span<const double> class_weights);

struct BatchLoss {
  double loss = 0.0;  // summed over graphs
  Matrix dlogits;     // G x K
};
BatchLoss batch_loss(const Matrix& logits, std::span<const int> labels, std::span<const double> class_weights);

/// Exact gradients of the summed loss given d(loss)/d(logits).
ModelParams backward(const GraphBatch& batch, const ForwardTrace& trace, const Matrix& dlogits,
                     const ModelParams& p, const ModelConfig& cfg);

/// Folds the batch statistics of a training-phase trace into the running
/// averages: running = momentum * running + (1 - momentum) * batch.
void update_running_stats(ModelParams& p, const ForwardTrace& trace, const ModelConfig& cfg);

/// Sign pattern of every rectifier input in the trace; two traces with the
/// same pattern lie on the same linear piece.
std::vector<std::uint8_t> activation_pattern(const ForwardTrace& trace);

}  // namespace dnpgcn

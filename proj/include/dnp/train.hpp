#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dnp/metrics.hpp"
#include "dnp/network.hpp"

namespace dnpgcn {

struct TrainOptions {
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Evaluation-phase batch size; fixed so that a reloaded model reproduces
/// training-time evaluations bit for bit.
inline constexpr int kEvalBatchSize = 64;

struct Evaluation {
  Matrix probabilities;  // G x K softmax
  std::vector<int> labels;
  double loss = 0.0;     // mean weighted cross-entropy
  Scores scores;
};

/// Forward pass in evaluation phase over labelled graphs.
Evaluation evaluate(const ModelParams& p, const ModelConfig& cfg, std::span<const MolGraph> graphs,
                    std::span<const double> class_weights);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;  // mean per-graph loss over the epoch's updates
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
};

/// Called after every epoch with the updated parameters.
using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&)>;

/// Adam on the summed weighted loss of each shuffled mini-batch, lr halved
/// every 50 epochs. Initialization and shuffling draw from sub-seeds of
/// `opts.seed`.
TrainResult train(const Dataset& ds, const ModelConfig& cfg, const TrainOptions& opts,
                  const EpochCallback& on_epoch = {});

}  // namespace dnpgcn

#include "dnp/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dnp/optimizer.hpp"

namespace dnpgcn {

void TrainOptions::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
}

namespace {

std::vector<int> labels_of(std::span<const MolGraph* const> graphs) {
  std::vector<int> y;
  for (const auto* g : graphs) {
    if (!g->label) throw Error("graph '" + g->id + "' has no label");
    y.push_back(*g->label);
  }
  return y;
}

}  // namespace

Evaluation evaluate(const ModelParams& p, const ModelConfig& cfg, std::span<const MolGraph> graphs,
                    std::span<const double> class_weights) {
  if (graphs.empty()) throw Error("nothing to evaluate");
  if (static_cast<int>(class_weights.size()) != cfg.classes)
    throw ConfigError("dataset has " + std::to_string(class_weights.size()) + " classes, model has " +
                      std::to_string(cfg.classes));
  Evaluation out;
  out.probabilities.resize(static_cast<Eigen::Index>(graphs.size()), cfg.classes);
  for (std::size_t start = 0; start < graphs.size(); start += kEvalBatchSize) {
    const std::size_t end = std::min(graphs.size(), start + kEvalBatchSize);
    std::vector<const MolGraph*> chunk;
    for (std::size_t k = start; k < end; ++k) chunk.push_back(&graphs[k]);
    const auto y = labels_of(chunk);
    for (int label : y)
      if (label >= cfg.classes) throw ConfigError("label " + std::to_string(label) + " outside the model's classes");
    const auto t = forward(make_batch(chunk), p, cfg, Phase::Eval);
    out.loss += batch_loss(t.logits, y, class_weights).loss;
    for (Eigen::Index r = 0; r < t.logits.rows(); ++r) {
      const Eigen::RowVectorXd ex = (t.logits.row(r).array() - t.logits.row(r).maxCoeff()).exp();
      out.probabilities.row(static_cast<Eigen::Index>(start) + r) = ex / ex.sum();
    }
    out.labels.insert(out.labels.end(), y.begin(), y.end());
  }
  out.loss /= static_cast<double>(graphs.size());
  out.scores = score(out.probabilities, out.labels);
  return out;
}

TrainResult train(const Dataset& ds, const ModelConfig& cfg, const TrainOptions& opts, const EpochCallback& on_epoch) {
  cfg.validate();
  opts.validate();
  if (ds.graphs.empty()) throw Error("cannot train on an empty dataset");
  if (static_cast<int>(ds.feature_width) != cfg.node_features)
    throw ConfigError("dataset node feature width " + std::to_string(ds.feature_width) + " does not match model " +
                      std::to_string(cfg.node_features));
  if (ds.class_count != cfg.classes)
    throw ConfigError("dataset has " + std::to_string(ds.class_count) + " classes, model has " +
                      std::to_string(cfg.classes));

  TrainResult result;
  result.params = init_params(cfg, derive_seed(opts.seed, "init"));
  auto refs = parameter_refs(result.params, cfg);
  AdamState adam = adam_init(refs);
  std::mt19937_64 shuffle_rng(derive_seed(opts.seed, "shuffle"));

  std::vector<std::size_t> order(ds.graphs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const double lr = scheduled_lr(opts.lr, epoch);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opts.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
      std::vector<const MolGraph*> chunk;
      for (std::size_t k = start; k < end; ++k) chunk.push_back(&ds.graphs[order[k]]);
      const auto batch = make_batch(chunk);
      const auto y = labels_of(chunk);
      const auto trace = forward(batch, result.params, cfg, Phase::Train);
      const auto bl = batch_loss(trace.logits, y, ds.class_weights);
      loss_sum += bl.loss;
      const ModelParams grad = backward(batch, trace, bl.dlogits, result.params, cfg);
      update_running_stats(result.params, trace, cfg);
      adam_step(refs, parameter_refs(grad, cfg), adam, lr);
    }
    const EpochRecord rec{epoch, lr, loss_sum / static_cast<double>(order.size())};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec, result.params);
  }
  return result;
}

}  // namespace dnpgcn

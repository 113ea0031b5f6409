#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dnp/train.hpp"

namespace dnpgcn {

struct FoldSplit {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> train, test;
};

/// Stratified, seeded k-fold partition. Graphs sharing a group id land in
/// the same fold; groups are stratified by their label composition. Throws
/// when a class has fewer than k members or there are fewer than k groups.
FoldSplit kfold(const Dataset& ds, int k, std::uint64_t seed);

struct AblationSpec {
  std::string id;
  DescriptorKind descriptor = DescriptorKind::Dnp;
  bool edge_in_node_update = true;
  bool edge_update = true;
  bool edge_in_readout = true;
  int width = 128;
  int depth = 2;
  NormMode norm = NormMode::Batch;

  ModelConfig model_config(const Dataset& ds) const;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over folds
};

struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> test_indices;
  std::vector<Scores> per_epoch;  // test-fold scores after each epoch
  Matrix final_probabilities;     // test-fold probabilities after the last epoch
  std::vector<int> labels;
};

struct MetricReport {
  std::string spec_id;
  std::vector<FoldResult> folds;
  /// Epoch with the best test accuracy averaged over folds (earliest on ties).
  int selected_epoch = 0;
  std::vector<Scores> selected, final;  // per fold
  Summary auc_selected, f1_selected, accuracy_selected;
  Summary auc_final, f1_final, accuracy_final;
};

Summary summarize(std::span<const double> values);

/// k-fold cross-validation of one spec. Class weights come from each
/// training fold; model and shuffle seeds are shared across folds.
MetricReport cross_validate(const Dataset& ds, const AblationSpec& spec, const TrainOptions& opts, int folds);

/// Every spec on the same folds. Errors are rethrown naming the spec.
std::vector<MetricReport> run_ablation(const Dataset& ds, std::span<const AblationSpec> specs,
                                       const TrainOptions& opts, int folds);

/// `spec_id,descriptor,node_update,edge_update,readout,width,depth,fold,auc,f1,accuracy`,
/// one row per fold plus "mean" and "std" rows per spec. `selected` picks the
/// selected-epoch metrics instead of the final-epoch ones.
std::string ablation_csv(std::span<const AblationSpec> specs, std::span<const MetricReport> reports,
                         bool selected = false);

}  // namespace dnpgcn

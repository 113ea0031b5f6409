#pragma once

#include <span>

#include "dnp/network.hpp"

namespace dnpgcn {

/// Mann-Whitney AUC with average ranks for ties; labels are 0/1. Throws
/// when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// F1 of `positive`; 0 when precision + recall = 0.
double f1(std::span<const int> predictions, std::span<const int> labels, int positive = 1);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

struct Scores {
  double auc = 0.0;  // NaN when undefined (a single class present)
  double f1 = 0.0;
  double accuracy = 0.0;
};

/// Binary: AUC on the class-1 probability, F1 of class 1. More classes:
/// one-vs-rest macro AUC over classes that have both positives and
/// negatives, macro F1 over all classes. Predictions are argmax rows.
Scores score(const Matrix& probabilities, std::span<const int> labels);

std::vector<int> argmax_rows(const Matrix& m);

}  // namespace dnpgcn

#include "dnp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dnpgcn {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k;
    while (end < n && scores[order[end]] == scores[order[k]]) ++end;
    const double rank = 0.5 * static_cast<double>(k + 1 + end);  // mean of ranks k+1..end
    for (std::size_t r = k; r < end; ++r) {
      const int y = labels[order[r]];
      if (y != 0 && y != 1) throw Error("auc: labels must be 0 or 1");
      if (y == 1) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    k = end;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw Error("auc: both classes must be present");
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double f1(std::span<const int> predictions, std::span<const int> labels, int positive) {
  if (predictions.size() != labels.size()) throw Error("f1: predictions and labels differ in length");
  if (predictions.empty()) throw Error("f1: empty input");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const bool pred = predictions[k] == positive, truth = labels[k] == positive;
    tp += pred && truth;
    fp += pred && !truth;
    fn += !pred && truth;
  }
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size() || labels.empty()) throw Error("accuracy: bad input lengths");
  std::size_t hit = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) hit += predictions[k] == labels[k];
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::Index best = 0;
    m.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

Scores score(const Matrix& probabilities, std::span<const int> labels) {
  const auto preds = argmax_rows(probabilities);
  const int k = static_cast<int>(probabilities.cols());
  Scores s;
  s.accuracy = accuracy(preds, labels);
  s.auc = std::numeric_limits<double>::quiet_NaN();
  if (k == 2) {
    std::vector<double> p1(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) p1[r] = probabilities(static_cast<Eigen::Index>(r), 1);
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
    if (both) s.auc = auc(p1, labels);
    s.f1 = f1(preds, labels, 1);
    return s;
  }
  double auc_sum = 0.0, f1_sum = 0.0;
  int auc_count = 0;
  for (int c = 0; c < k; ++c) {
    std::vector<double> pc(labels.size());
    std::vector<int> yc(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
      pc[r] = probabilities(static_cast<Eigen::Index>(r), c);
      yc[r] = labels[r] == c ? 1 : 0;
    }
    const auto pos = std::count(yc.begin(), yc.end(), 1);
    if (pos > 0 && pos < static_cast<long>(yc.size())) {
      auc_sum += auc(pc, yc);
      ++auc_count;
    }
    f1_sum += f1(preds, labels, c);
  }
  if (auc_count > 0) s.auc = auc_sum / auc_count;
  s.f1 = f1_sum / k;
  return s;
}

}  // namespace dnpgcn

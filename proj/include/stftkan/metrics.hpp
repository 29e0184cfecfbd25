#pragma once

#include "stftkan/core.hpp"

#include <cstdint>
#include <vector>

namespace stftkan {

struct Metrics {
  double oa = 0.0;
  double ba = 0.0;
  std::vector<double> per_class_recall;
  Matrix<std::int64_t> confusion;  // rows: true class, cols: predicted
  double epoch_time_s = 0.0;
  std::int64_t param_count = 0;
};

// OA = correct / total; BA = mean per-class recall over classes that
// appear in the labels (absent classes are excluded from the average).
inline Metrics compute_metrics(const std::vector<int>& predictions,
                               const std::vector<int>& labels, int num_classes) {
  if (predictions.empty() || predictions.size() != labels.size())
    throw DataError("metrics: need equal-length non-empty prediction/label lists");
  Metrics m;
  m.confusion = Matrix<std::int64_t>::Zero(num_classes, num_classes);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
        predictions[i] >= num_classes)
      throw DataError("metrics: class index out of range");
    m.confusion(labels[i], predictions[i])++;
    if (labels[i] == predictions[i]) ++correct;
  }
  m.oa = static_cast<double>(correct) / static_cast<double>(labels.size());
  m.per_class_recall.assign(num_classes, 0.0);
  int present = 0;
  double recall_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const std::int64_t total = m.confusion.row(c).sum();
    if (total == 0) continue;
    m.per_class_recall[c] =
        static_cast<double>(m.confusion(c, c)) / static_cast<double>(total);
    recall_sum += m.per_class_recall[c];
    ++present;
  }
  m.ba = present > 0 ? recall_sum / present : 0.0;
  return m;
}

// argmax with lowest-index tie-break
template <typename S>
int predict_class(const Vector<S>& logits) {
  int best = 0;
  for (int c = 1; c < logits.size(); ++c)
    if (logits(c) > logits(best)) best = c;
  return best;
}

}  // namespace stftkan

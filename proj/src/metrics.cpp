#include "emtl/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace emtl {

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(labels.size()) + " labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    int p = predictions[i], y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1))
      throw std::invalid_argument("confusion: non-binary value at position " + std::to_string(i));
    if (p == 1 && y == 1)
      ++cm.tp;
    else if (p == 1 && y == 0)
      ++cm.fp;
    else if (p == 0 && y == 1)
      ++cm.fn;
    else
      ++cm.tn;
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  const long total = cm.total();
  if (total == 0) {
    r.empty = true;
    r.precision_degenerate = r.recall_degenerate = r.f1_degenerate = true;
    return r;
  }
  r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  if (cm.tp + cm.fp > 0)
    r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  else
    r.precision_degenerate = true;
  if (cm.tp + cm.fn > 0)
    r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  else
    r.recall_degenerate = true;
  if (2 * cm.tp + cm.fp + cm.fn > 0)
    r.f1 = static_cast<double>(2 * cm.tp) / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
  else
    r.f1_degenerate = true;
  return r;
}

double multiclass_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("multiclass_accuracy: size mismatch");
  if (predictions.empty()) return 0.0;
  long hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

std::string metrics_csv_row(const MetricsReport& m) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", m.accuracy, m.precision, m.recall, m.f1);
  return buf;
}

}  // namespace emtl

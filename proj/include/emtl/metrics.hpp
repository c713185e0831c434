#pragma once

#include <string>
#include <vector>

namespace emtl {

// Binary confusion counts; the positive class is label 1 (rumour/fake).
struct ConfusionMatrix {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // set when the corresponding denominator was zero and the metric was
  // reported as 0 instead of aborting the run
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
  bool empty = false;  // no samples at all

  bool any_degenerate() const {
    return precision_degenerate || recall_degenerate || f1_degenerate || empty;
  }
};

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

// accuracy (tp+tn)/total, precision tp/(tp+fp), recall tp/(tp+fn),
// f1 2tp/(2tp+fp+fn); zero denominators yield 0 with the flag set.
// An entirely empty matrix throws (accuracy is undefined).
MetricsReport compute_metrics(const ConfusionMatrix& cm);

// Multi-class fraction of exact matches; used for the auxiliary head.
double multiclass_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

std::string metrics_csv_row(const MetricsReport& m);  // accuracy,precision,recall,f1 at 6 digits

}  // namespace emtl

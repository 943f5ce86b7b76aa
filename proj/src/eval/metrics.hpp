#pragma once

#include <vector>

namespace ipd {

// Binary confusion-matrix metrics; positive class = IPI. Ratios whose
// denominator is zero are flagged undefined rather than given a value.
struct MetricsReport {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double f1 = 0.0, precision = 0.0, recall = 0.0;
  double fpr = 0.0, fnr = 0.0, accuracy = 0.0;
  bool precision_defined = false;
  bool recall_defined = false;  // recall = 1 - fnr, so one flag covers both
  bool fpr_defined = false;
  bool f1_defined = false;
  long n() const { return tp + fp + fn + tn; }
};

// predictions/labels in {0,1}, equal nonzero length (else throws).
MetricsReport compute_metrics(const std::vector<int>& predictions,
                              const std::vector<int>& labels);
MetricsReport metrics_from_counts(long tp, long fp, long fn, long tn);

// Mean and population standard deviation of a per-fold metric.
struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};
Aggregate aggregate(const std::vector<double>& values);

}  // namespace ipd

#include "eval/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ipd {

MetricsReport metrics_from_counts(long tp, long fp, long fn, long tn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  const long n = r.n();
  if (n <= 0) throw std::invalid_argument("metrics_from_counts: empty confusion matrix");

  const long pred_pos = tp + fp;
  const long actual_pos = tp + fn;
  const long actual_neg = fp + tn;

  r.precision_defined = pred_pos > 0;
  if (r.precision_defined) {
    r.precision = static_cast<double>(tp) / static_cast<double>(pred_pos);
  }
  r.recall_defined = actual_pos > 0;
  if (r.recall_defined) {
    r.recall = static_cast<double>(tp) / static_cast<double>(actual_pos);
    r.fnr = static_cast<double>(fn) / static_cast<double>(actual_pos);
  }
  r.fpr_defined = actual_neg > 0;
  if (r.fpr_defined) {
    r.fpr = static_cast<double>(fp) / static_cast<double>(actual_neg);
  }
  r.f1_defined = (2 * tp + fp + fn) > 0;
  if (r.f1_defined) {
    r.f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
  return r;
}

MetricsReport compute_metrics(const std::vector<int>& predictions,
                              const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("compute_metrics: length mismatch");
  }
  if (predictions.empty()) throw std::invalid_argument("compute_metrics: empty input");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i], y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw std::invalid_argument("compute_metrics: values must be 0/1");
    }
    if (p == 1 && y == 1) ++tp;
    else if (p == 1 && y == 0) ++fp;
    else if (p == 0 && y == 1) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = static_cast<int>(values.size());
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return a;
}

}  // namespace ipd

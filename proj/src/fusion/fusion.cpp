#include "fusion/fusion.hpp"

#include <algorithm>
#include <stdexcept>

namespace ipd {

double fusion_score(const IntentDistribution& dist, int k, double epsilon) {
  if (k < 1) throw std::invalid_argument("fusion_score: k must be >= 1");
  const int C = static_cast<int>(dist.probs.size());
  if (dist.nio_index < 0 || dist.nio_index >= C) {
    throw std::invalid_argument("fusion_score: nio_index out of range");
  }
  const double p_nio = dist.probs[static_cast<size_t>(dist.nio_index)];

  std::vector<double> others;
  others.reserve(static_cast<size_t>(C) - 1);
  double other_sum = 0.0;
  for (int c = 0; c < C; ++c) {
    if (c == dist.nio_index) continue;
    others.push_back(dist.probs[static_cast<size_t>(c)]);
    other_sum += dist.probs[static_cast<size_t>(c)];
  }
  std::sort(others.begin(), others.end(), std::greater<double>());

  double margin = 0.0;
  if (k == 1) {
    margin = p_nio - (others.empty() ? 0.0 : others.front());
  } else {
    const int m = std::min<int>(k - 1, static_cast<int>(others.size()));
    double top_sum = 0.0;
    for (int i = 0; i < m; ++i) top_sum += others[static_cast<size_t>(i)];
    margin = p_nio - (m > 0 ? top_sum / static_cast<double>(m) : 0.0);
  }
  return (p_nio / (other_sum + epsilon)) * margin;
}

double fusion_score(const IntentDistribution& dist, const FusionParams& params) {
  return fusion_score(dist, params.k, params.epsilon);
}

namespace {

// F1 of the IPI-positive class for threshold T; returns -1 when undefined
// (no predicted positives and no true positives never happens here because
// the caller guarantees both classes, but precision/recall can still be 0).
double f1_at_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                       double t) {
  long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const int pred = scores[i] > t ? 0 : 1;  // safe iff S > T
    if (pred == 1 && labels[i] == 1) ++tp;
    else if (pred == 1 && labels[i] == 0) ++fp;
    else if (pred == 0 && labels[i] == 1) ++fn;
  }
  const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp) +
                       static_cast<double>(fn);
  if (denom == 0.0) return 0.0;
  return 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace

double calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                           const FusionParams& params) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("calibrate_threshold: scores/labels size mismatch or empty");
  }
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == 0) has_neg = true;
    else throw std::invalid_argument("calibrate_threshold: labels must be 0/1");
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("calibrate_threshold: validation set must contain both classes");
  }
  double best_t = params.grid_lo;
  double best_f1 = -1.0;
  for (int i = 0; i < params.grid_points; ++i) {
    const double t = params.grid_lo + params.grid_step * static_cast<double>(i);
    const double f1 = f1_at_threshold(scores, labels, t);
    if (f1 > best_f1) {  // strict: ties keep the smallest T
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

int decide(int u_hat, double score, double threshold) {
  if (u_hat == 0) return 0;
  return score > threshold ? 0 : 1;
}

}  // namespace ipd

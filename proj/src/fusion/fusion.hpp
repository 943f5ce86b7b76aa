#pragma once

#include <vector>

#include "core/intent_dist.hpp"

namespace ipd {

// Parameters of the context-aware risk score and its decision threshold.
struct FusionParams {
  int k = 1;                 // top-k set size for the margin term
  double epsilon = 1e-6;     // divisor regularizer
  double threshold = 0.0;    // T, set by calibrate_threshold
  double grid_lo = 0.0;      // candidate thresholds: grid_lo + i*grid_step
  double grid_step = 0.01;
  int grid_points = 201;     // covers 0.00 .. 2.00 inclusive
};

// One fused per-window verdict. y_hat==1 only when u_hat==1 and the risk
// score did not clear the safety threshold.
struct FusionDecision {
  int u_hat = 0;      // smoothed identity verdict (1 = non-owner)
  double score = 0.0; // risk score S
  int y_hat = 0;      // final IPI verdict
  std::vector<std::pair<int, double>> top_intents;  // class index, probability
};

// Risk score S = (p_nio / (sum of non-NIO mass + eps)) * margin, where the
// margin compares p_nio against the mean of the (k-1) largest non-NIO
// probabilities (k >= 2) or the single largest one (k == 1). Computed in
// double precision.
double fusion_score(const IntentDistribution& dist, int k, double epsilon);
double fusion_score(const IntentDistribution& dist, const FusionParams& params);

// Grid search for the threshold maximizing F1 of the IPI-positive class,
// where a window is predicted safe iff S > T. Ties break toward the
// smallest T. Throws std::invalid_argument when validation labels are
// single-class.
double calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                           const FusionParams& params = {});

// Final per-window decision: owner windows are always safe; non-owner
// windows are safe only when the score clears the threshold.
int decide(int u_hat, double score, double threshold);

}  // namespace ipd

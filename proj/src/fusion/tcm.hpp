#pragma once

#include <cstdint>
#include <vector>

#include "core/intent_dist.hpp"

namespace ipd {

// Temporal Consistency Module windows. Identity smoothing computes rolling
// mean/std features over w_stat scores, clusters them with k-means (k=2),
// labels the lower-mean-score cluster as owner, then majority-votes over
// w_vote consecutive assignments. Intent smoothing is a trailing average
// over w_avg distributions.
struct TcmParams {
  int w_stat = 10;
  int w_vote = 10;
  int w_avg = 5;
  uint64_t seed = 13;  // k-means seeding
};

// Time-ordered identity scores -> time-ordered u_hat in {0,1}
// (1 = non-owner). Partial windows at the start use the available prefix.
std::vector<int> tcm_identity(const std::vector<double>& scores, const TcmParams& params);

// Trailing renormalized average of intent distributions.
std::vector<IntentDistribution> tcm_intent(const std::vector<IntentDistribution>& dists,
                                           const TcmParams& params);

}  // namespace ipd

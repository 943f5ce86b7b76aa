#include "fusion/tcm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ml/kmeans.hpp"

namespace ipd {

std::vector<int> tcm_identity(const std::vector<double>& scores, const TcmParams& params) {
  if (scores.empty()) throw std::invalid_argument("tcm_identity: empty score sequence");
  if (params.w_stat < 1 || params.w_vote < 1) {
    throw std::invalid_argument("tcm_identity: window lengths must be >= 1");
  }
  const size_t n = scores.size();

  // Rolling mean/std features (population std, prefix-aware).
  Eigen::MatrixXd feats(static_cast<Eigen::Index>(n), 2);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(params.w_stat)
                          ? i + 1 - static_cast<size_t>(params.w_stat)
                          : 0;
    double sum = 0.0, sq = 0.0;
    const double cnt = static_cast<double>(i - lo + 1);
    for (size_t j = lo; j <= i; ++j) {
      sum += scores[j];
      sq += scores[j] * scores[j];
    }
    const double mean = sum / cnt;
    const double var = std::max(0.0, sq / cnt - mean * mean);
    feats(static_cast<Eigen::Index>(i), 0) = mean;
    feats(static_cast<Eigen::Index>(i), 1) = std::sqrt(var);
  }

  const ml::KMeansResult km = ml::kmeans(feats, 2, params.seed);

  // Owner cluster = the one whose member raw scores average lower. An empty
  // cluster means the stream never splits, so everything is owner.
  double mean_score[2] = {0.0, 0.0};
  size_t count[2] = {0, 0};
  for (size_t i = 0; i < n; ++i) {
    const int c = km.assignments[i];
    mean_score[c] += scores[i];
    ++count[c];
  }
  std::vector<int> raw(n, 0);
  if (count[0] > 0 && count[1] > 0) {
    mean_score[0] /= static_cast<double>(count[0]);
    mean_score[1] /= static_cast<double>(count[1]);
    const int owner_cluster = mean_score[0] <= mean_score[1] ? 0 : 1;
    for (size_t i = 0; i < n; ++i) raw[i] = km.assignments[i] == owner_cluster ? 0 : 1;
  }

  // Majority vote over the trailing w_vote assignments; ties -> non-owner.
  std::vector<int> out(n, 0);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(params.w_vote)
                          ? i + 1 - static_cast<size_t>(params.w_vote)
                          : 0;
    int ones = 0;
    const int total = static_cast<int>(i - lo + 1);
    for (size_t j = lo; j <= i; ++j) ones += raw[j];
    out[i] = (2 * ones >= total) ? 1 : 0;
  }
  return out;
}

std::vector<IntentDistribution> tcm_intent(const std::vector<IntentDistribution>& dists,
                                           const TcmParams& params) {
  if (dists.empty()) throw std::invalid_argument("tcm_intent: empty sequence");
  if (params.w_avg < 1) throw std::invalid_argument("tcm_intent: w_avg must be >= 1");
  const size_t C = dists.front().probs.size();
  for (const auto& d : dists) {
    if (d.probs.size() != C) throw std::invalid_argument("tcm_intent: ragged distributions");
  }
  std::vector<IntentDistribution> out(dists.size());
  for (size_t i = 0; i < dists.size(); ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(params.w_avg)
                          ? i + 1 - static_cast<size_t>(params.w_avg)
                          : 0;
    IntentDistribution d = dists[i];
    std::fill(d.probs.begin(), d.probs.end(), 0.0);
    for (size_t j = lo; j <= i; ++j) {
      for (size_t c = 0; c < C; ++c) d.probs[c] += dists[j].probs[c];
    }
    double sum = 0.0;
    for (double p : d.probs) sum += p;
    for (auto& p : d.probs) p /= sum;
    out[i] = std::move(d);
  }
  return out;
}

}  // namespace ipd

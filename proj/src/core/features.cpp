#include "core/features.hpp"

#include <cmath>
#include <stdexcept>

namespace ipd {

FeatureVector encode_sample(const MultimodalSample& s) {
  FeatureVector v{};
  for (int i = 0; i < kImuDim; ++i) v[i] = s.imu[static_cast<size_t>(i)];
  for (int i = 0; i < kSysDim; ++i) v[kImuDim + i] = s.sys[static_cast<size_t>(i)];
  v[kIntRateIndex] = s.int_rate;
  v[kEventOneHotBegin + static_cast<int>(s.int_event)] = 1.0f;
  if (s.app != App::Other) {
    v[kAppOneHotBegin + static_cast<int>(s.app)] = 1.0f;
  }
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("encode_sample: non-finite value in sample");
    }
  }
  return v;
}

IntEvent decode_event(const FeatureVector& v) {
  for (int i = 0; i < kEventOneHotSlots; ++i) {
    if (v[kEventOneHotBegin + i] != 0.0f) return static_cast<IntEvent>(i);
  }
  throw std::invalid_argument("decode_event: no event slot set");
}

App decode_app(const FeatureVector& v) {
  for (int i = 0; i < kAppOneHotSlots; ++i) {
    if (v[kAppOneHotBegin + i] != 0.0f) return static_cast<App>(i);
  }
  return App::Other;
}

bool is_one_hot_dim(int index) {
  return index >= kEventOneHotBegin && index < kFeatureDim;
}

NormalizationParams fit_normalizer(const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) {
    throw std::invalid_argument("fit_normalizer: empty input");
  }
  NormalizationParams p;
  for (int i = 0; i < kFeatureDim; ++i) {
    if (is_one_hot_dim(i)) {
      p.min_max[static_cast<size_t>(i)] = {0.0f, 1.0f};
      continue;
    }
    float lo = vectors[0][static_cast<size_t>(i)];
    float hi = lo;
    for (const auto& v : vectors) {
      lo = std::min(lo, v[static_cast<size_t>(i)]);
      hi = std::max(hi, v[static_cast<size_t>(i)]);
    }
    p.min_max[static_cast<size_t>(i)] = {lo, hi};
  }
  return p;
}

FeatureVector apply_normalizer(const NormalizationParams& p, const FeatureVector& v) {
  FeatureVector out{};
  for (int i = 0; i < kFeatureDim; ++i) {
    const auto [lo, hi] = p.min_max[static_cast<size_t>(i)];
    if (hi <= lo) {
      out[static_cast<size_t>(i)] = 0.0f;
      continue;
    }
    float x = (v[static_cast<size_t>(i)] - lo) / (hi - lo);
    out[static_cast<size_t>(i)] = std::clamp(x, 0.0f, 1.0f);
  }
  return out;
}

}  // namespace ipd

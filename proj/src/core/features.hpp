#pragma once

#include <array>
#include <vector>

#include "core/sample.hpp"

namespace ipd {

// Canonical 40-dim feature layout:
//   [0..18]   IMU channels
//   [19..25]  SYS channels
//   [26]      interaction rate
//   [27..33]  interaction event one-hot, 7 slots incl. NONE
//   [34..39]  foreground app one-hot over the six named apps; OTHER is the
//             all-zero block (the only layout that keeps d = 40 with a
//             dedicated NONE event slot)
inline constexpr int kFeatureDim = 40;
inline constexpr int kIntRateIndex = 26;
inline constexpr int kEventOneHotBegin = 27;
inline constexpr int kEventOneHotSlots = 7;
inline constexpr int kAppOneHotBegin = 34;
inline constexpr int kAppOneHotSlots = 6;

// Identity branch consumes IMU+SYS, intent branch INT+APP. The two masks
// partition the 40 dims.
inline constexpr int kIdentityDim = 26;  // [0, 26)
inline constexpr int kIntentDim = 14;    // [26, 40)
inline constexpr int kIntentBegin = 26;

using FeatureVector = std::array<float, kFeatureDim>;

// Deterministic encoding; timestamp is not a feature. Throws on NaN/inf.
FeatureVector encode_sample(const MultimodalSample& s);

// Recover the enum fields from an encoded vector (exact round-trip).
IntEvent decode_event(const FeatureVector& v);
App decode_app(const FeatureVector& v);

bool is_one_hot_dim(int index);

struct NormalizationParams {
  // Per-feature (min, max); one-hot dims are pinned to (0, 1).
  std::array<std::pair<float, float>, kFeatureDim> min_max{};
};

// Fit per-feature min/max over the sequence; throws on empty input.
NormalizationParams fit_normalizer(const std::vector<FeatureVector>& vectors);

// v' = clamp((v - min) / (max - min), 0, 1); constant features map to 0.
FeatureVector apply_normalizer(const NormalizationParams& p, const FeatureVector& v);

}  // namespace ipd

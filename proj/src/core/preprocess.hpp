#pragma once

#include <vector>

#include "core/features.hpp"
#include "core/sample.hpp"

namespace ipd {

// Zero-order-hold resampling onto a uniform grid t0 + k/target_hz.
// Produces floor((t_last - t0) * target_hz) + 1 samples; each grid point
// copies the latest sample with t <= grid time. Throws if the trace is empty,
// unsorted, or target_hz <= 0.
SessionTrace resample_zoh(const SessionTrace& trace, double target_hz);

struct Window {
  // Row-major [steps x kFeatureDim].
  std::vector<FeatureVector> rows;
  double t_start = 0.0;   // timestamp of first sample in the window
  int source_offset = 0;  // index of first sample in the resampled trace
};

// Sliding windows of span_s seconds every stride_s seconds over a trace that
// is already on a uniform grid at rate_hz. Yields
// floor((n - span_s*rate_hz) / (stride_s*rate_hz)) + 1 windows (0 if the trace
// is shorter than one span). Samples are encoded but not normalized.
std::vector<Window> make_windows(const SessionTrace& trace, double span_s, double stride_s,
                                 double rate_hz);

// Default windowing used throughout the pipeline: 20 Hz grid, 2 s span,
// 1 s stride -> 40x40 windows.
inline constexpr double kDefaultRateHz = 20.0;
inline constexpr double kDefaultSpanS = 2.0;
inline constexpr double kDefaultStrideS = 1.0;
inline constexpr int kDefaultWindowSteps = 40;

}  // namespace ipd

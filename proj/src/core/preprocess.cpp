#include "core/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace ipd {

SessionTrace resample_zoh(const SessionTrace& trace, double target_hz) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("resample_zoh: empty trace");
  }
  if (!(target_hz > 0.0)) {
    throw std::invalid_argument("resample_zoh: target_hz must be positive");
  }
  for (size_t i = 1; i < trace.samples.size(); ++i) {
    if (trace.samples[i].t < trace.samples[i - 1].t) {
      throw std::invalid_argument("resample_zoh: timestamps not sorted");
    }
  }
  const double t0 = trace.samples.front().t;
  const double t_last = trace.samples.back().t;
  const auto count = static_cast<size_t>(std::floor((t_last - t0) * target_hz)) + 1;

  SessionTrace out = trace;
  out.rate_hz = target_hz;
  out.samples.clear();
  out.samples.reserve(count);
  size_t src = 0;
  for (size_t k = 0; k < count; ++k) {
    const double tg = t0 + static_cast<double>(k) / target_hz;
    while (src + 1 < trace.samples.size() && trace.samples[src + 1].t <= tg) ++src;
    MultimodalSample s = trace.samples[src];
    s.t = tg;
    out.samples.push_back(s);
  }
  return out;
}

std::vector<Window> make_windows(const SessionTrace& trace, double span_s, double stride_s,
                                 double rate_hz) {
  if (!(span_s > 0.0) || !(stride_s > 0.0) || !(rate_hz > 0.0)) {
    throw std::invalid_argument("make_windows: span, stride and rate must be positive");
  }
  const auto span = static_cast<size_t>(std::lround(span_s * rate_hz));
  const auto stride = static_cast<size_t>(std::lround(stride_s * rate_hz));
  if (span == 0 || stride == 0) {
    throw std::invalid_argument("make_windows: span/stride below one sample");
  }
  std::vector<Window> windows;
  const size_t n = trace.samples.size();
  if (n < span) return windows;
  const size_t count = (n - span) / stride + 1;
  windows.reserve(count);
  for (size_t w = 0; w < count; ++w) {
    const size_t off = w * stride;
    Window win;
    win.t_start = trace.samples[off].t;
    win.source_offset = static_cast<int>(off);
    win.rows.reserve(span);
    for (size_t i = 0; i < span; ++i) {
      win.rows.push_back(encode_sample(trace.samples[off + i]));
    }
    windows.push_back(std::move(win));
  }
  return windows;
}

}  // namespace ipd

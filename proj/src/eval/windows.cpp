#include "eval/windows.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "core/trace_io.hpp"

namespace ipd {

std::vector<WindowRecord> window_session(const CorpusManifest& manifest,
                                         const SessionMeta& meta, const WindowOptions& opt) {
  const std::string path = manifest.dir + "/" + meta.file;
  const SessionTrace trace = read_session_jsonl(path);
  const SessionTrace grid = resample_zoh(trace, opt.rate_hz);
  const std::vector<Window> wins = make_windows(grid, opt.span_s, opt.stride_s, opt.rate_hz);

  std::vector<WindowRecord> out;
  out.reserve(wins.size());
  for (const Window& w : wins) {
    WindowRecord r;
    r.features.resize(static_cast<Eigen::Index>(w.rows.size()), kFeatureDim);
    for (size_t i = 0; i < w.rows.size(); ++i) {
      for (int c = 0; c < kFeatureDim; ++c) {
        r.features(static_cast<Eigen::Index>(i), c) = w.rows[i][static_cast<size_t>(c)];
      }
    }
    r.user_id = meta.user_id;
    r.session_id = meta.session_id;
    r.subaction = meta.subaction;
    r.platform = meta.platform;
    r.session_t0 = meta.t0;
    r.t_start = meta.t0 + (w.t_start - grid.samples.front().t);
    out.push_back(std::move(r));
  }
  return out;
}

WindowStore::WindowStore(const CorpusManifest& manifest, WindowOptions opt)
    : manifest_(&manifest), opt_(opt) {}

const std::vector<WindowRecord>& WindowStore::user(const std::string& user_id) {
  auto it = cache_.find(user_id);
  if (it != cache_.end()) return it->second;
  std::vector<WindowRecord> records;
  for (const SessionMeta* meta : manifest_->sessions_of(user_id)) {
    std::vector<WindowRecord> s = window_session(*manifest_, *meta, opt_);
    records.insert(records.end(), std::make_move_iterator(s.begin()),
                   std::make_move_iterator(s.end()));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const WindowRecord& a, const WindowRecord& b) {
                     if (a.session_t0 != b.session_t0) return a.session_t0 < b.session_t0;
                     return a.t_start < b.t_start;
                   });
  return cache_.emplace(user_id, std::move(records)).first->second;
}

NormalizationParams fit_normalizer_records(const std::vector<const WindowRecord*>& records) {
  if (records.empty()) throw std::invalid_argument("fit_normalizer_records: empty input");
  NormalizationParams p;
  for (int c = 0; c < kFeatureDim; ++c) {
    p.min_max[static_cast<size_t>(c)] = {std::numeric_limits<float>::max(),
                                         std::numeric_limits<float>::lowest()};
  }
  for (const WindowRecord* r : records) {
    for (int c = 0; c < kFeatureDim; ++c) {
      auto& mm = p.min_max[static_cast<size_t>(c)];
      const float lo = r->features.col(c).minCoeff();
      const float hi = r->features.col(c).maxCoeff();
      mm.first = std::min(mm.first, lo);
      mm.second = std::max(mm.second, hi);
    }
  }
  for (int c = 0; c < kFeatureDim; ++c) {
    if (is_one_hot_dim(c)) p.min_max[static_cast<size_t>(c)] = {0.0f, 1.0f};
  }
  return p;
}

void normalize_window(const NormalizationParams& p, WindowMat& w) {
  for (int c = 0; c < kFeatureDim; ++c) {
    const auto [lo, hi] = p.min_max[static_cast<size_t>(c)];
    const float range = hi - lo;
    if (range <= 0.0f) {
      w.col(c).setZero();
      continue;
    }
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const float v = (w(r, c) - lo) / range;
      w(r, c) = std::clamp(v, 0.0f, 1.0f);
    }
  }
}

std::vector<int> identity_default_dims() {
  std::vector<int> d;
  for (int c = 0; c < kIdentityDim; ++c) d.push_back(c);
  return d;
}

std::vector<int> intent_default_dims() {
  std::vector<int> d;
  for (int c = kIntentBegin; c < kFeatureDim; ++c) d.push_back(c);
  return d;
}

WindowMat slice_dims(const WindowMat& w, const std::vector<int>& dims) {
  WindowMat out(w.rows(), static_cast<Eigen::Index>(dims.size()));
  for (size_t j = 0; j < dims.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = w.col(dims[j]);
  }
  return out;
}

std::vector<WindowMat> prepare_windows(const std::vector<const WindowRecord*>& records,
                                       const NormalizationParams& norm,
                                       const std::vector<int>& dims) {
  std::vector<WindowMat> out;
  out.reserve(records.size());
  for (const WindowRecord* r : records) {
    WindowMat w = r->features;
    normalize_window(norm, w);
    out.push_back(slice_dims(w, dims));
  }
  return out;
}

int record_label(const WindowRecord& r, Granularity g) {
  return class_index(label_of(r.subaction), g);
}

}  // namespace ipd

#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/preprocess.hpp"
#include "core/taxonomy.hpp"
#include "gen/corpus.hpp"
#include "models/autoencoder.hpp"

namespace ipd {

// One fully prepared window plus the metadata evaluation needs.
struct WindowRecord {
  WindowMat features;  // steps x kFeatureDim, raw (unnormalized) values
  std::string user_id;
  std::string session_id;
  Subaction subaction = Subaction::Nio;
  App platform = App::Other;
  double session_t0 = 0.0;  // session start on the user's timeline
  double t_start = 0.0;     // window start (absolute, session t0 + offset)
};

struct WindowOptions {
  double rate_hz = kDefaultRateHz;
  double span_s = kDefaultSpanS;
  double stride_s = kDefaultStrideS;
};

// Windows a single session file (resample -> slide -> encode).
std::vector<WindowRecord> window_session(const CorpusManifest& manifest,
                                         const SessionMeta& meta, const WindowOptions& opt);

// Loads and windows users lazily, caching per user. Records are ordered by
// (session t0, window t_start) within each user.
class WindowStore {
 public:
  WindowStore(const CorpusManifest& manifest, WindowOptions opt = {});
  const std::vector<WindowRecord>& user(const std::string& user_id);
  const CorpusManifest& manifest() const { return *manifest_; }
  const WindowOptions& options() const { return opt_; }
  void clear() { cache_.clear(); }

 private:
  const CorpusManifest* manifest_;
  WindowOptions opt_;
  std::map<std::string, std::vector<WindowRecord>> cache_;
};

// Min/max fit over every row of every record; one-hot dims pinned to (0,1).
// Matches fit_normalizer on the concatenated rows.
NormalizationParams fit_normalizer_records(const std::vector<const WindowRecord*>& records);

// In-place min-max scaling of a raw window matrix.
void normalize_window(const NormalizationParams& p, WindowMat& w);

// Column subsets of the canonical layout.
std::vector<int> identity_default_dims();  // [0, 26)
std::vector<int> intent_default_dims();    // [26, 40)
WindowMat slice_dims(const WindowMat& w, const std::vector<int>& dims);

// Normalized + sliced copies for a batch of records.
std::vector<WindowMat> prepare_windows(const std::vector<const WindowRecord*>& records,
                                       const NormalizationParams& norm,
                                       const std::vector<int>& dims);

// Intent-branch label of a record at a granularity.
int record_label(const WindowRecord& r, Granularity g);

}  // namespace ipd

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "models/autoencoder.hpp"
#include "models/identity_head.hpp"

namespace ipd {

enum class SelectionScheme { Random = 0, Time, Similarity };
std::string scheme_name(SelectionScheme s);
SelectionScheme scheme_from_name(const std::string& n);

// Few-shot owner calibration: how many owner windows to keep and how to
// pick them from the calibration session.
struct AdaptationConfig {
  int n_shots = 20;
  SelectionScheme scheme = SelectionScheme::Random;
  double hard_frac = 0.3;  // similarity scheme: most negative-like windows
  double mid_frac = 0.5;
  double easy_frac = 0.2;
  int pool_users = 3;
  uint64_t seed = 1;
};

// Picks calibration windows from a chronologically ordered owner list.
// random = seeded uniform sample; time = earliest n_shots; similarity =
// rank by mean cosine similarity to the negative pool (computed on raw
// flattened windows) and mix hard/mid/easy slices 30/50/20. Returns sorted
// indices into owner_windows; if there are fewer than n_shots windows all
// of them are returned.
std::vector<int> select_calibration_windows(const std::vector<WindowMat>& owner_windows,
                                            const std::vector<WindowMat>& negative_pool,
                                            const AdaptationConfig& cfg);

struct AdaptResult {
  IdentityHead head;
  std::vector<int> selected_owner;     // indices into owner_windows
  std::vector<int> selected_negative;  // indices into negative_pool
};

// Selection stage only: scheme-chosen owner indices plus an equal count of
// uniformly sampled negative indices, no head fitting.
std::pair<std::vector<int>, std::vector<int>> select_adaptation_sets(
    const std::vector<WindowMat>& owner_windows, const std::vector<WindowMat>& negative_pool,
    const AdaptationConfig& cfg);

// Runs the selection scheme, pushes the chosen owner windows and an equal
// count of uniformly sampled negative-pool windows through the frozen AE,
// and fits the SVM head on the resulting difference vectors. The AE weights
// are never touched (guarded by weights_hash in tests).
AdaptResult adapt(MultiHeadAE& ae, const std::vector<WindowMat>& owner_windows,
                  const std::vector<WindowMat>& negative_pool, const AdaptationConfig& cfg,
                  const ml::SvmConfig& svm_cfg = {});

// Frozen-AE inference helper: difference vectors for a window list,
// processed in minibatches.
std::vector<Eigen::VectorXd> difference_vectors(MultiHeadAE& ae,
                                                const std::vector<WindowMat>& windows,
                                                int batch_size = 512);

}  // namespace ipd

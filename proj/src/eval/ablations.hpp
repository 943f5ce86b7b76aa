#pragma once

#include <string>
#include <vector>

#include "eval/pipeline.hpp"
#include "nn/serialize.hpp"

namespace ipd {

struct AblationOptions {
  PipelineConfig base;
  std::vector<int> fold_ids;  // empty = every manifest fold
  std::vector<double> rates = {1, 2, 5, 10, 20};   // Hz
  std::vector<double> spans = {1, 2, 5, 10, 20};   // seconds
  std::vector<int> head_counts = {1, 2, 4, 8, 12, 16};
};

// Row x column grid of per-fold aggregates.
struct AblationTable {
  std::string kind;
  std::string metric;
  std::vector<std::string> rows, cols;
  std::vector<std::vector<Aggregate>> cells;  // [row][col]

  std::string to_text() const;
  nn::json to_json() const;
};

inline const std::vector<std::string> kAblationKinds = {
    "modality", "app_held_out", "rate_window", "head_count", "id_classifier_head"};

// Runs one named ablation over the manifest's folds; throws
// std::invalid_argument for unknown kinds.
std::vector<AblationTable> run_ablation(const std::string& kind,
                                        const CorpusManifest& manifest,
                                        const AblationOptions& opt);

// One fold of the identity branch with a swapped classifier head
// (svm | rf | xgboost | dense | lstm).
MetricsReport identity_fold_with_head(WindowStore& store, const FoldSpec& fold,
                                      const PipelineConfig& cfg, const std::string& head_kind);

}  // namespace ipd

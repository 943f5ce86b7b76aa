#pragma once

#include <string>
#include <vector>

#include "eval/pipeline.hpp"

namespace ipd {

// Shared per-fold state handed to the baseline implementations so they can
// reuse the already-trained models and the already-evaluated test stream.
struct BaselineContext {
  WindowStore* store = nullptr;
  const FoldSpec* fold = nullptr;
  const PipelineConfig* cfg = nullptr;
  TrainedModels* models = nullptr;
  const IdentityHead* head = nullptr;
  const std::vector<int>* id_dims = nullptr;
  const std::vector<int>* in_dims = nullptr;
  const std::vector<const WindowRecord*>* test_recs = nullptr;
  const std::vector<WindowMat>* test_identity = nullptr;
  const std::vector<WindowMat>* test_intent = nullptr;
  const StreamEval* test_eval = nullptr;
  const std::vector<int>* y_true = nullptr;
  const std::vector<const WindowRecord*>* pool_recs = nullptr;     // finetune 80%
  const std::vector<const WindowRecord*>* snippet_recs = nullptr;  // victim 5 min
};

// Runs one named comparator on the fold's test stream; throws
// std::invalid_argument for unknown names.
MetricsReport baseline_metrics(const std::string& name, BaselineContext& ctx);

// Per-window reconstruction MSE through the frozen AE.
std::vector<double> reconstruction_errors(MultiHeadAE& ae,
                                          const std::vector<WindowMat>& windows,
                                          int batch_size = 512);

// Cross-set mean Euclidean distance / cosine similarity over all pairs.
struct EmbeddingStats {
  double euclidean = 0.0;
  double cosine = 0.0;
  size_t pairs = 0;
};
EmbeddingStats embedding_stats(const std::vector<Eigen::VectorXd>& owners,
                               const std::vector<Eigen::VectorXd>& attackers);

}  // namespace ipd

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adapt/adapt.hpp"
#include "eval/folds.hpp"
#include "eval/metrics.hpp"
#include "eval/windows.hpp"
#include "fusion/fusion.hpp"
#include "fusion/tcm.hpp"
#include "models/intent.hpp"

namespace ipd {

// Every knob of one end-to-end run. Training budgets default to the full
// contract values; tests and the CLI can shrink subsample/epoch counts.
struct PipelineConfig {
  Granularity granularity = Granularity::Category;
  Backbone backbone = Backbone::LstmCnn;
  int ae_heads = 8;
  int ae_head_hidden = 8;
  int ae_decoder_hidden = 64;
  int ae_max_epochs = 100;
  int ae_patience = 5;
  int intent_epochs = 50;
  int batch_size = 512;
  float lr = 1e-3f;
  int ae_subsample = 0;      // cap on AE pretrain windows; 0 = all
  int intent_subsample = 0;  // cap on intent pretrain windows; 0 = all
  AdaptationConfig adapt;
  TcmParams tcm;
  FusionParams fusion;  // fusion.k is the primary top-k setting
  ml::SvmConfig svm;
  double val_fraction = 0.2;  // finetune slice reserved for calibration
  bool use_tcm = true;
  std::vector<int> identity_dims;  // empty = IMU+SYS default
  std::vector<int> intent_dims;    // empty = INT+APP default
  uint64_t seed = 1;
  int verbose = 0;

  uint64_t config_hash() const;  // stable digest over every field
};

// One per-window verdict in the test stream.
struct DecisionRecord {
  std::string user_id;
  std::string session_id;
  double t_start = 0.0;
  App platform = App::Other;
  int y_true = 0;
  int u_hat = 0;
  double identity_score = 0.0;
  double fusion_score = 0.0;
  int y_hat = 0;
  std::vector<std::pair<int, double>> top_intents;  // smoothed, descending
};

struct KResult {
  int k = 1;
  double threshold = 0.0;
  MetricsReport metrics;
};

struct FoldResult {
  int fold_id = 0;
  std::string victim, abuser, pair_type;
  uint64_t config_hash = 0;
  double threshold = 0.0;        // at the primary k
  MetricsReport metrics;         // end-to-end IPI at the primary k
  MetricsReport identity;        // u_hat vs. true non-owner (positive = non-owner)
  std::vector<KResult> k_sweep;  // per requested k
  std::vector<double> topk_accuracy;  // [0] = top-1, on smoothed intents
  double intent_top1_raw = 0.0;       // unsmoothed top-1 for reference
  uint64_t ae_hash = 0;
  std::map<std::string, MetricsReport> baselines;
  double embed_euclidean = 0.0, embed_cosine = 0.0;
  bool embed_computed = false;
  std::vector<DecisionRecord> decisions;
  TrainLog ae_log, intent_log;
};

struct FoldRunRequest {
  std::vector<int> k_sweep = {1, 2, 3};
  std::vector<std::string> baselines;  // baseline names to attach
  bool embedding = false;
  bool keep_decisions = true;
};

inline const std::vector<std::string> kBaselineNames = {
    "monolithic",  "ae_anomaly",   "auth_only",  "har_only",
    "blackbox_mlp", "blackbox_svm", "blackbox_rf"};

// Models shared by one fold run (and by the artifact-based CLI flow).
struct TrainedModels {
  NormalizationParams norm;
  std::unique_ptr<MultiHeadAE> ae;
  std::unique_ptr<IntentModel> intent;
  TrainLog ae_log, intent_log;
};

// Pretrains normalizer + AE + intent model on the given users' windows.
// The two branch flags let single-branch evaluations skip the other model.
TrainedModels pretrain_models(WindowStore& store, const std::vector<std::string>& users,
                              const PipelineConfig& cfg, bool want_ae = true,
                              bool want_intent = true);

// Branch inference over one time-ordered stream of prepared windows.
struct StreamEval {
  std::vector<double> id_scores;             // raw SVM scores
  std::vector<int> u_hat;                    // after TCM
  std::vector<IntentDistribution> raw;       // per-window intent
  std::vector<IntentDistribution> smoothed;  // after TCM
};
StreamEval eval_stream(MultiHeadAE& ae, const IdentityHead& head, IntentModel& intent,
                       const std::vector<WindowMat>& identity_windows,
                       const std::vector<WindowMat>& intent_windows, const TcmParams& tcm,
                       bool use_tcm);

// Full leave-two-out fold: pretrain -> adapt -> calibrate -> test (+ any
// requested baselines / embedding stats).
FoldResult run_fold(WindowStore& store, const FoldSpec& fold, const PipelineConfig& cfg,
                    const FoldRunRequest& req = {});

// Contract-level conveniences.
FoldResult run_pipeline(WindowStore& store, const FoldSpec& fold, const PipelineConfig& cfg);
MetricsReport run_baseline(const std::string& name, WindowStore& store, const FoldSpec& fold,
                           const PipelineConfig& cfg);

// Helpers shared with baselines/ablations.
std::vector<int> subsample_indices(size_t n, size_t cap, uint64_t seed);
IntentDistribution dist_from_row(const nn::Mat& probs, Eigen::Index row, Granularity g);
int topk_hit(const IntentDistribution& d, int true_class, int k);  // 1 if in top-k

// Identity-branch data for one fold: frozen AE plus the selected 1:1
// adaptation windows and the prepared test stream, all identity-sliced and
// normalized. Lets ablations swap the classifier head without retraining.
struct IdentityEvalData {
  NormalizationParams norm;
  std::unique_ptr<MultiHeadAE> ae;
  std::vector<WindowMat> owner_sel, neg_sel;  // adaptation windows
  std::vector<WindowMat> test_windows;        // victim-then-abuser stream
  std::vector<int> owner_truth;               // 1 = abuser window
};
IdentityEvalData identity_eval_data(WindowStore& store, const FoldSpec& fold,
                                    const PipelineConfig& cfg);

// Identity branch alone: AE + SVM head + TCM, no intent model.
MetricsReport identity_only_fold(WindowStore& store, const FoldSpec& fold,
                                 const PipelineConfig& cfg);

// Intent branch alone; top-1..top-3 accuracy on the fold's (smoothed) test
// stream, optionally holding apps out of the training split.
std::vector<double> intent_only_fold(WindowStore& store, const FoldSpec& fold,
                                     const PipelineConfig& cfg,
                                     const std::vector<App>& exclude_apps = {});

}  // namespace ipd

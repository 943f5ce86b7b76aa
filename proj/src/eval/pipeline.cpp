#include "eval/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "core/util.hpp"
#include "eval/baselines.hpp"

namespace ipd {

uint64_t PipelineConfig::config_hash() const {
  std::ostringstream os;
  os << "g=" << static_cast<int>(granularity) << ";bb=" << backbone_name(backbone)
     << ";heads=" << ae_heads << "," << ae_head_hidden << "," << ae_decoder_hidden
     << ";ae=" << ae_max_epochs << "," << ae_patience << ";ie=" << intent_epochs
     << ";bs=" << batch_size << ";lr=" << lr << ";sub=" << ae_subsample << ","
     << intent_subsample << ";ad=" << adapt.n_shots << "," << scheme_name(adapt.scheme) << ","
     << adapt.hard_frac << "," << adapt.mid_frac << "," << adapt.easy_frac << ","
     << adapt.pool_users << "," << adapt.seed << ";tcm=" << tcm.w_stat << "," << tcm.w_vote
     << "," << tcm.w_avg << "," << tcm.seed << ";fus=" << fusion.k << "," << fusion.epsilon
     << "," << fusion.grid_lo << "," << fusion.grid_step << "," << fusion.grid_points
     << ";svm=" << svm.C << "," << svm.gamma << "," << svm.tol << "," << svm.max_passes << ","
     << svm.max_iterations << "," << svm.seed << ";vf=" << val_fraction
     << ";tcm_on=" << use_tcm << ";seed=" << seed << ";idd=";
  for (int d : identity_dims) os << d << ",";
  os << ";ind=";
  for (int d : intent_dims) os << d << ",";
  return fnv1a64(os.str());
}

std::vector<int> subsample_indices(size_t n, size_t cap, uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (cap == 0 || cap >= n) return idx;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

IntentDistribution dist_from_row(const nn::Mat& probs, Eigen::Index row, Granularity g) {
  IntentDistribution d;
  d.granularity = g;
  d.nio_index = nio_class_index(g);
  d.probs.resize(static_cast<size_t>(probs.cols()));
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    d.probs[static_cast<size_t>(c)] = static_cast<double>(probs(row, c));
  }
  return d;
}

int topk_hit(const IntentDistribution& d, int true_class, int k) {
  for (const auto& [cls, p] : topk(d, k)) {
    if (cls == true_class) return 1;
  }
  return 0;
}

namespace {

int window_steps(const WindowOptions& opt) {
  return static_cast<int>(std::lround(opt.span_s * opt.rate_hz));
}

std::vector<const WindowRecord*> gather(WindowStore& store,
                                        const std::vector<std::string>& users) {
  std::vector<const WindowRecord*> out;
  for (const auto& u : users) {
    for (const WindowRecord& r : store.user(u)) out.push_back(&r);
  }
  return out;
}

std::vector<const WindowRecord*> pick(const std::vector<const WindowRecord*>& recs,
                                      const std::vector<int>& idx) {
  std::vector<const WindowRecord*> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(recs[static_cast<size_t>(i)]);
  return out;
}

}  // namespace

TrainedModels pretrain_models(WindowStore& store, const std::vector<std::string>& users,
                              const PipelineConfig& cfg, bool want_ae, bool want_intent) {
  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;
  const std::vector<int> in_dims =
      cfg.intent_dims.empty() ? intent_default_dims() : cfg.intent_dims;
  const int steps = window_steps(store.options());

  std::vector<const WindowRecord*> pre = gather(store, users);
  if (pre.empty()) throw std::runtime_error("pretrain_models: no pretrain windows");

  TrainedModels out;
  out.norm = fit_normalizer_records(pre);

  if (want_ae) {
    const std::vector<int> sub = subsample_indices(
        pre.size(), static_cast<size_t>(cfg.ae_subsample), derive_seed(cfg.seed, "ae.sub"));
    const std::vector<WindowMat> ae_windows = prepare_windows(pick(pre, sub), out.norm, id_dims);
    MultiHeadAE::Config acfg;
    acfg.input_dim = static_cast<int>(id_dims.size());
    acfg.steps = steps;
    acfg.heads = cfg.ae_heads;
    acfg.head_hidden = cfg.ae_head_hidden;
    acfg.decoder_hidden = cfg.ae_decoder_hidden;
    acfg.seed = derive_seed(cfg.seed, "ae.init");
    out.ae = std::make_unique<MultiHeadAE>(acfg);
    TrainConfig tc;
    tc.max_epochs = cfg.ae_max_epochs;
    tc.batch_size = cfg.batch_size;
    tc.lr = cfg.lr;
    tc.patience = cfg.ae_patience;
    tc.seed = derive_seed(cfg.seed, "ae.train");
    tc.verbose = cfg.verbose > 1;
    out.ae_log = out.ae->train(ae_windows, tc);
  }
  if (want_intent) {
    const std::vector<int> sub =
        subsample_indices(pre.size(), static_cast<size_t>(cfg.intent_subsample),
                          derive_seed(cfg.seed, "intent.sub"));
    const std::vector<const WindowRecord*> recs = pick(pre, sub);
    const std::vector<WindowMat> in_windows = prepare_windows(recs, out.norm, in_dims);
    std::vector<int> labels;
    labels.reserve(recs.size());
    for (const WindowRecord* r : recs) labels.push_back(record_label(*r, cfg.granularity));
    IntentModel::Config icfg;
    icfg.backbone = cfg.backbone;
    icfg.granularity = cfg.granularity;
    icfg.input_dim = static_cast<int>(in_dims.size());
    icfg.steps = steps;
    icfg.seed = derive_seed(cfg.seed, "intent.init");
    out.intent = std::make_unique<IntentModel>(icfg);
    TrainConfig tc;
    tc.max_epochs = cfg.intent_epochs;
    tc.batch_size = cfg.batch_size;
    tc.lr = cfg.lr;
    tc.patience = 0;  // fixed-epoch training
    tc.seed = derive_seed(cfg.seed, "intent.train");
    tc.verbose = cfg.verbose > 1;
    out.intent_log = out.intent->train(in_windows, labels, tc);
  }
  return out;
}

StreamEval eval_stream(MultiHeadAE& ae, const IdentityHead& head, IntentModel& intent,
                       const std::vector<WindowMat>& identity_windows,
                       const std::vector<WindowMat>& intent_windows, const TcmParams& tcm,
                       bool use_tcm) {
  if (identity_windows.size() != intent_windows.size()) {
    throw std::invalid_argument("eval_stream: branch window counts differ");
  }
  StreamEval out;
  const size_t n = identity_windows.size();
  if (n == 0) return out;

  const std::vector<Eigen::VectorXd> dvs = difference_vectors(ae, identity_windows);
  out.id_scores.reserve(n);
  for (const auto& dv : dvs) out.id_scores.push_back(head.score(dv));

  const nn::Mat probs = intent.predict_batch(intent_windows);
  const Granularity g = intent.config().granularity;
  out.raw.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.raw.push_back(dist_from_row(probs, static_cast<Eigen::Index>(i), g));
  }

  if (use_tcm) {
    out.u_hat = tcm_identity(out.id_scores, tcm);
    out.smoothed = tcm_intent(out.raw, tcm);
  } else {
    out.u_hat.reserve(n);
    for (double s : out.id_scores) out.u_hat.push_back(s > 0.0 ? 1 : 0);
    out.smoothed = out.raw;
  }
  return out;
}

FoldResult run_fold(WindowStore& store, const FoldSpec& fold, const PipelineConfig& cfg,
                    const FoldRunRequest& req) {
  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;
  const std::vector<int> in_dims =
      cfg.intent_dims.empty() ? intent_default_dims() : cfg.intent_dims;

  FoldResult res;
  res.fold_id = fold.fold_id;
  res.victim = fold.victim;
  res.abuser = fold.abuser;
  res.pair_type = fold.pair_type;
  res.config_hash = cfg.config_hash();

  if (cfg.verbose) {
    std::fprintf(stderr, "[fold %02d] pretraining on %zu users\n", fold.fold_id,
                 fold.pretrain_users.size());
  }
  TrainedModels models = pretrain_models(store, fold.pretrain_users, cfg);
  res.ae_log = models.ae_log;
  res.intent_log = models.intent_log;

  // Fine-tune users: a deterministic every-Nth slice goes to threshold
  // calibration, the rest forms the adaptation negative pool.
  const int every = std::max(2, static_cast<int>(std::lround(1.0 / std::max(0.01, cfg.val_fraction))));
  std::vector<const WindowRecord*> pool_recs;
  std::vector<std::vector<const WindowRecord*>> val_by_user;  // time-ordered per user
  for (const auto& u : fold.finetune_users) {
    const auto& recs = store.user(u);
    std::vector<const WindowRecord*> val;
    for (size_t i = 0; i < recs.size(); ++i) {
      if (static_cast<int>(i % static_cast<size_t>(every)) == every - 1) {
        val.push_back(&recs[i]);
      } else {
        pool_recs.push_back(&recs[i]);
      }
    }
    val_by_user.push_back(std::move(val));
  }
  if (pool_recs.empty()) throw std::runtime_error("run_fold: empty finetune pool");

  // Victim snippet = sessions starting inside the calibration cut-off.
  std::vector<const WindowRecord*> snippet, victim_test;
  for (const WindowRecord& r : store.user(fold.victim)) {
    if (r.session_t0 < fold.snippet_seconds) snippet.push_back(&r);
    else victim_test.push_back(&r);
  }
  if (snippet.empty()) throw std::runtime_error("run_fold: victim snippet is empty");

  const std::vector<WindowMat> owner_id = prepare_windows(snippet, models.norm, id_dims);
  const std::vector<WindowMat> pool_id = prepare_windows(pool_recs, models.norm, id_dims);

  AdaptationConfig acfg = cfg.adapt;
  acfg.seed = derive_seed(cfg.seed, "adapt", static_cast<uint64_t>(fold.fold_id));
  AdaptResult adapted = adapt(*models.ae, owner_id, pool_id, acfg, cfg.svm);
  res.ae_hash = models.ae->weights_hash();

  // ---- threshold calibration on the validation slice ----
  std::vector<int> ks = req.k_sweep;
  if (std::find(ks.begin(), ks.end(), cfg.fusion.k) == ks.end()) ks.push_back(cfg.fusion.k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<double> val_scores_any;  // filtered to u_hat==1 when possible
  std::vector<int> val_labels_any;
  std::vector<std::vector<double>> val_scores_k(ks.size()), val_scores_k_all(ks.size());
  std::vector<int> val_labels, val_labels_all;
  for (const auto& val : val_by_user) {
    if (val.empty()) continue;
    const std::vector<WindowMat> vid = prepare_windows(val, models.norm, id_dims);
    const std::vector<WindowMat> vin = prepare_windows(val, models.norm, in_dims);
    const StreamEval ev =
        eval_stream(*models.ae, adapted.head, *models.intent, vid, vin, cfg.tcm, cfg.use_tcm);
    for (size_t i = 0; i < val.size(); ++i) {
      const int y = val[i]->subaction == Subaction::Nio ? 0 : 1;
      for (size_t kix = 0; kix < ks.size(); ++kix) {
        const double s = fusion_score(ev.smoothed[i], ks[kix], cfg.fusion.epsilon);
        val_scores_k_all[kix].push_back(s);
        if (ev.u_hat[i] == 1) val_scores_k[kix].push_back(s);
      }
      val_labels_all.push_back(y);
      if (ev.u_hat[i] == 1) val_labels.push_back(y);
    }
  }
  const bool filtered_ok =
      std::count(val_labels.begin(), val_labels.end(), 1) > 0 &&
      std::count(val_labels.begin(), val_labels.end(), 0) > 0;
  const std::vector<int>& cal_labels = filtered_ok ? val_labels : val_labels_all;
  const std::vector<std::vector<double>>& cal_scores =
      filtered_ok ? val_scores_k : val_scores_k_all;

  std::vector<double> thresholds(ks.size());
  for (size_t kix = 0; kix < ks.size(); ++kix) {
    thresholds[kix] = calibrate_threshold(cal_scores[kix], cal_labels, cfg.fusion);
  }

  // ---- test stream: victim (post-snippet) then abuser, each time-ordered ----
  std::vector<const WindowRecord*> test_recs = victim_test;
  for (const WindowRecord& r : store.user(fold.abuser)) test_recs.push_back(&r);
  if (test_recs.empty()) throw std::runtime_error("run_fold: empty test stream");

  const std::vector<WindowMat> tid = prepare_windows(test_recs, models.norm, id_dims);
  const std::vector<WindowMat> tin = prepare_windows(test_recs, models.norm, in_dims);
  StreamEval test_ev =
      eval_stream(*models.ae, adapted.head, *models.intent, tid, tin, cfg.tcm, cfg.use_tcm);

  std::vector<int> y_true, owner_truth;
  y_true.reserve(test_recs.size());
  for (const WindowRecord* r : test_recs) {
    const bool non_owner = r->user_id == fold.abuser;
    const bool non_nio = r->subaction != Subaction::Nio;
    y_true.push_back(non_owner && non_nio ? 1 : 0);
    owner_truth.push_back(non_owner ? 1 : 0);
  }
  res.identity = compute_metrics(test_ev.u_hat, owner_truth);

  const int C = class_count(cfg.granularity);
  const int max_topk = std::min(3, C);
  res.topk_accuracy.assign(static_cast<size_t>(max_topk), 0.0);
  double top1_raw = 0.0;
  for (size_t i = 0; i < test_recs.size(); ++i) {
    const int truth = record_label(*test_recs[i], cfg.granularity);
    for (int k = 1; k <= max_topk; ++k) {
      res.topk_accuracy[static_cast<size_t>(k - 1)] +=
          topk_hit(test_ev.smoothed[i], truth, k);
    }
    top1_raw += topk_hit(test_ev.raw[i], truth, 1);
  }
  for (auto& a : res.topk_accuracy) a /= static_cast<double>(test_recs.size());
  res.intent_top1_raw = top1_raw / static_cast<double>(test_recs.size());

  for (size_t kix = 0; kix < ks.size(); ++kix) {
    const int k = ks[kix];
    std::vector<int> preds;
    preds.reserve(test_recs.size());
    for (size_t i = 0; i < test_recs.size(); ++i) {
      const double s = fusion_score(test_ev.smoothed[i], k, cfg.fusion.epsilon);
      preds.push_back(decide(test_ev.u_hat[i], s, thresholds[kix]));
    }
    KResult kr;
    kr.k = k;
    kr.threshold = thresholds[kix];
    kr.metrics = compute_metrics(preds, y_true);
    res.k_sweep.push_back(kr);
    if (k == cfg.fusion.k) {
      res.metrics = kr.metrics;
      res.threshold = kr.threshold;
      if (req.keep_decisions) {
        res.decisions.clear();
        res.decisions.reserve(test_recs.size());
        for (size_t i = 0; i < test_recs.size(); ++i) {
          DecisionRecord d;
          d.user_id = test_recs[i]->user_id;
          d.session_id = test_recs[i]->session_id;
          d.t_start = test_recs[i]->t_start;
          d.platform = test_recs[i]->platform;
          d.y_true = y_true[i];
          d.u_hat = test_ev.u_hat[i];
          d.identity_score = test_ev.id_scores[i];
          d.fusion_score = fusion_score(test_ev.smoothed[i], k, cfg.fusion.epsilon);
          d.y_hat = preds[i];
          d.top_intents = topk(test_ev.smoothed[i], std::min(3, C));
          res.decisions.push_back(std::move(d));
        }
      }
    }
  }

  if (!req.baselines.empty() || req.embedding) {
    BaselineContext ctx;
    ctx.store = &store;
    ctx.fold = &fold;
    ctx.cfg = &cfg;
    ctx.models = &models;
    ctx.head = &adapted.head;
    ctx.id_dims = &id_dims;
    ctx.in_dims = &in_dims;
    ctx.test_recs = &test_recs;
    ctx.test_identity = &tid;
    ctx.test_intent = &tin;
    ctx.test_eval = &test_ev;
    ctx.y_true = &y_true;
    ctx.pool_recs = &pool_recs;
    ctx.snippet_recs = &snippet;
    for (const std::string& name : req.baselines) {
      res.baselines[name] = baseline_metrics(name, ctx);
    }
    if (req.embedding) {
      // Owner-vs-attacker difference-vector statistics on the test stream.
      std::vector<Eigen::VectorXd> owner_dvs, attacker_dvs;
      const std::vector<Eigen::VectorXd> dvs = difference_vectors(*models.ae, tid);
      for (size_t i = 0; i < test_recs.size(); ++i) {
        if (test_recs[i]->user_id == fold.abuser) attacker_dvs.push_back(dvs[i]);
        else owner_dvs.push_back(dvs[i]);
      }
      const EmbeddingStats st = embedding_stats(owner_dvs, attacker_dvs);
      res.embed_euclidean = st.euclidean;
      res.embed_cosine = st.cosine;
      res.embed_computed = true;
    }
  }

  if (cfg.verbose) {
    std::fprintf(stderr, "[fold %02d] F1=%.3f FPR=%.3f idF1=%.3f T=%.2f\n", fold.fold_id,
                 res.metrics.f1, res.metrics.fpr, res.identity.f1, res.threshold);
  }
  return res;
}

FoldResult run_pipeline(WindowStore& store, const FoldSpec& fold, const PipelineConfig& cfg) {
  FoldRunRequest req;
  req.k_sweep = {cfg.fusion.k};
  return run_fold(store, fold, cfg, req);
}

MetricsReport run_baseline(const std::string& name, WindowStore& store, const FoldSpec& fold,
                           const PipelineConfig& cfg) {
  if (std::find(kBaselineNames.begin(), kBaselineNames.end(), name) == kBaselineNames.end()) {
    throw std::invalid_argument("unknown baseline: " + name);
  }
  FoldRunRequest req;
  req.k_sweep = {cfg.fusion.k};
  req.baselines = {name};
  req.keep_decisions = false;
  return run_fold(store, fold, cfg, req).baselines.at(name);
}

IdentityEvalData identity_eval_data(WindowStore& store, const FoldSpec& fold,
                                    const PipelineConfig& cfg) {
  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;

  IdentityEvalData out;
  TrainedModels models = pretrain_models(store, fold.pretrain_users, cfg, true, false);
  out.norm = models.norm;
  out.ae = std::move(models.ae);

  const int every =
      std::max(2, static_cast<int>(std::lround(1.0 / std::max(0.01, cfg.val_fraction))));
  std::vector<const WindowRecord*> pool_recs;
  for (const auto& u : fold.finetune_users) {
    const auto& recs = store.user(u);
    for (size_t i = 0; i < recs.size(); ++i) {
      if (static_cast<int>(i % static_cast<size_t>(every)) != every - 1) {
        pool_recs.push_back(&recs[i]);
      }
    }
  }
  std::vector<const WindowRecord*> snippet, victim_test;
  for (const WindowRecord& r : store.user(fold.victim)) {
    if (r.session_t0 < fold.snippet_seconds) snippet.push_back(&r);
    else victim_test.push_back(&r);
  }
  if (snippet.empty() || pool_recs.empty()) {
    throw std::runtime_error("identity_eval_data: empty snippet or pool");
  }

  const std::vector<WindowMat> owner_id = prepare_windows(snippet, out.norm, id_dims);
  const std::vector<WindowMat> pool_id = prepare_windows(pool_recs, out.norm, id_dims);
  AdaptationConfig acfg = cfg.adapt;
  acfg.seed = derive_seed(cfg.seed, "adapt", static_cast<uint64_t>(fold.fold_id));
  const auto [own_idx, neg_idx] = select_adaptation_sets(owner_id, pool_id, acfg);
  for (int i : own_idx) out.owner_sel.push_back(owner_id[static_cast<size_t>(i)]);
  for (int i : neg_idx) out.neg_sel.push_back(pool_id[static_cast<size_t>(i)]);

  std::vector<const WindowRecord*> test_recs = victim_test;
  for (const WindowRecord& r : store.user(fold.abuser)) test_recs.push_back(&r);
  out.test_windows = prepare_windows(test_recs, out.norm, id_dims);
  out.owner_truth.reserve(test_recs.size());
  for (const WindowRecord* r : test_recs) {
    out.owner_truth.push_back(r->user_id == fold.abuser ? 1 : 0);
  }
  return out;
}

MetricsReport identity_only_fold(WindowStore& store, const FoldSpec& fold,
                                 const PipelineConfig& cfg) {
  IdentityEvalData data = identity_eval_data(store, fold, cfg);
  IdentityHead head;
  head.fit(difference_vectors(*data.ae, data.owner_sel),
           difference_vectors(*data.ae, data.neg_sel), cfg.svm);
  const std::vector<Eigen::VectorXd> dvs = difference_vectors(*data.ae, data.test_windows);
  std::vector<double> scores;
  scores.reserve(dvs.size());
  for (const auto& dv : dvs) scores.push_back(head.score(dv));
  std::vector<int> u_hat;
  if (cfg.use_tcm) {
    u_hat = tcm_identity(scores, cfg.tcm);
  } else {
    for (double s : scores) u_hat.push_back(s > 0.0 ? 1 : 0);
  }
  return compute_metrics(u_hat, data.owner_truth);
}

std::vector<double> intent_only_fold(WindowStore& store, const FoldSpec& fold,
                                     const PipelineConfig& cfg,
                                     const std::vector<App>& exclude_apps) {
  const std::vector<int> in_dims =
      cfg.intent_dims.empty() ? intent_default_dims() : cfg.intent_dims;
  const int steps = static_cast<int>(std::lround(store.options().span_s * store.options().rate_hz));

  std::vector<const WindowRecord*> pre;
  for (const auto& u : fold.pretrain_users) {
    for (const WindowRecord& r : store.user(u)) {
      if (std::find(exclude_apps.begin(), exclude_apps.end(), r.platform) !=
          exclude_apps.end()) {
        continue;
      }
      pre.push_back(&r);
    }
  }
  if (pre.empty()) throw std::runtime_error("intent_only_fold: empty training set");
  const NormalizationParams norm = fit_normalizer_records(pre);

  const std::vector<int> sub =
      subsample_indices(pre.size(), static_cast<size_t>(cfg.intent_subsample),
                        derive_seed(cfg.seed, "intent.sub"));
  const std::vector<const WindowRecord*> recs = pick(pre, sub);
  const std::vector<WindowMat> xs = prepare_windows(recs, norm, in_dims);
  std::vector<int> ys;
  ys.reserve(recs.size());
  for (const WindowRecord* r : recs) ys.push_back(record_label(*r, cfg.granularity));

  IntentModel::Config icfg;
  icfg.backbone = cfg.backbone;
  icfg.granularity = cfg.granularity;
  icfg.input_dim = static_cast<int>(in_dims.size());
  icfg.steps = steps;
  icfg.seed = derive_seed(cfg.seed, "intent.init");
  IntentModel model(icfg);
  TrainConfig tc;
  tc.max_epochs = cfg.intent_epochs;
  tc.batch_size = cfg.batch_size;
  tc.lr = cfg.lr;
  tc.patience = 0;
  tc.seed = derive_seed(cfg.seed, "intent.train");
  model.train(xs, ys, tc);

  std::vector<const WindowRecord*> test_recs;
  for (const WindowRecord& r : store.user(fold.victim)) {
    if (r.session_t0 >= fold.snippet_seconds) test_recs.push_back(&r);
  }
  for (const WindowRecord& r : store.user(fold.abuser)) test_recs.push_back(&r);
  if (test_recs.empty()) throw std::runtime_error("intent_only_fold: empty test stream");
  const std::vector<WindowMat> txs = prepare_windows(test_recs, norm, in_dims);

  const nn::Mat probs = model.predict_batch(txs);
  std::vector<IntentDistribution> dists;
  dists.reserve(txs.size());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    dists.push_back(dist_from_row(probs, r, cfg.granularity));
  }
  if (cfg.use_tcm) dists = tcm_intent(dists, cfg.tcm);

  const int C = class_count(cfg.granularity);
  const int max_topk = std::min(3, C);
  std::vector<double> acc(static_cast<size_t>(max_topk), 0.0);
  for (size_t i = 0; i < test_recs.size(); ++i) {
    const int truth = record_label(*test_recs[i], cfg.granularity);
    for (int k = 1; k <= max_topk; ++k) {
      acc[static_cast<size_t>(k - 1)] += topk_hit(dists[i], truth, k);
    }
  }
  for (auto& a : acc) a /= static_cast<double>(test_recs.size());
  return acc;
}

}  // namespace ipd

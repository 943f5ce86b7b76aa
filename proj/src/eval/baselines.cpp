#include "eval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/util.hpp"
#include "ml/svm.hpp"
#include "ml/tree.hpp"

namespace ipd {

std::vector<double> reconstruction_errors(MultiHeadAE& ae,
                                          const std::vector<WindowMat>& windows,
                                          int batch_size) {
  std::vector<double> out;
  out.reserve(windows.size());
  std::vector<int> idx;
  for (size_t off = 0; off < windows.size(); off += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(windows.size(), off + static_cast<size_t>(batch_size));
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    const nn::Seq x = make_batch(windows, idx);
    const nn::Seq recon = ae.reconstruct_batch(x);
    const size_t T = x.size();
    const auto B = x[0].rows();
    const auto D = x[0].cols();
    for (Eigen::Index b = 0; b < B; ++b) {
      double sq = 0.0;
      for (size_t t = 0; t < T; ++t) {
        for (Eigen::Index c = 0; c < D; ++c) {
          const double diff =
              static_cast<double>(x[t](b, c)) - static_cast<double>(recon[t](b, c));
          sq += diff * diff;
        }
      }
      out.push_back(sq / (static_cast<double>(T) * static_cast<double>(D)));
    }
  }
  return out;
}

EmbeddingStats embedding_stats(const std::vector<Eigen::VectorXd>& owners,
                               const std::vector<Eigen::VectorXd>& attackers) {
  EmbeddingStats st;
  if (owners.empty() || attackers.empty()) return st;
  double euclid = 0.0, cosine = 0.0;
  for (const auto& a : owners) {
    const double na = a.norm();
    for (const auto& b : attackers) {
      euclid += (a - b).norm();
      const double nb = b.norm();
      cosine += (na > 0.0 && nb > 0.0) ? a.dot(b) / (na * nb) : 0.0;
    }
  }
  st.pairs = owners.size() * attackers.size();
  st.euclidean = euclid / static_cast<double>(st.pairs);
  st.cosine = cosine / static_cast<double>(st.pairs);
  return st;
}

namespace {

std::vector<int> all_dims() {
  std::vector<int> d(kFeatureDim);
  std::iota(d.begin(), d.end(), 0);
  return d;
}

// Latent (AE) + penultimate (intent) features for a record batch.
Eigen::MatrixXd fused_features(BaselineContext& ctx,
                               const std::vector<const WindowRecord*>& recs) {
  const std::vector<WindowMat> idw =
      prepare_windows(recs, ctx.models->norm, *ctx.id_dims);
  const std::vector<WindowMat> inw = prepare_windows(recs, ctx.models->norm, *ctx.in_dims);

  const int latent_dim = ctx.models->ae->config().heads * ctx.models->ae->config().head_hidden;
  const int pen_dim = ctx.models->intent->config().dense_units;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(recs.size()), latent_dim + pen_dim);

  constexpr size_t kChunk = 512;
  std::vector<int> idx;
  for (size_t off = 0; off < recs.size(); off += kChunk) {
    const size_t end = std::min(recs.size(), off + kChunk);
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    const nn::Seq x = make_batch(idw, idx);
    const nn::Mat lat = ctx.models->ae->latent_batch(x);
    for (Eigen::Index r = 0; r < lat.rows(); ++r) {
      for (int c = 0; c < latent_dim; ++c) {
        X(static_cast<Eigen::Index>(off) + r, c) = static_cast<double>(lat(r, c));
      }
    }
  }
  const nn::Mat pen = ctx.models->intent->penultimate_batch(inw);
  for (Eigen::Index r = 0; r < pen.rows(); ++r) {
    for (int c = 0; c < pen_dim; ++c) {
      X(r, latent_dim + c) = static_cast<double>(pen(r, c));
    }
  }
  return X;
}

// Fine-tune pool + owner snippet with direct IPI labels (owner snippet = 0,
// pool windows = 1 iff non-NIO), capped for tractable comparator training.
void blackbox_training_set(BaselineContext& ctx, size_t cap,
                           std::vector<const WindowRecord*>* recs, std::vector<int>* y) {
  std::vector<const WindowRecord*> all;
  std::vector<int> labels;
  for (const WindowRecord* r : *ctx.snippet_recs) {
    all.push_back(r);
    labels.push_back(0);
  }
  for (const WindowRecord* r : *ctx.pool_recs) {
    all.push_back(r);
    labels.push_back(r->subaction == Subaction::Nio ? 0 : 1);
  }
  const std::vector<int> sub =
      subsample_indices(all.size(), cap, derive_seed(ctx.cfg->seed, "bb.sub"));
  recs->clear();
  y->clear();
  for (int i : sub) {
    recs->push_back(all[static_cast<size_t>(i)]);
    y->push_back(labels[static_cast<size_t>(i)]);
  }
}

MetricsReport monolithic(BaselineContext& ctx) {
  // Single LSTM-CNN trained end-to-end on binary IPI labels over all 40 dims.
  WindowStore& store = *ctx.store;
  const std::vector<int> dims = all_dims();
  std::vector<const WindowRecord*> pre;
  for (const auto& u : ctx.fold->pretrain_users) {
    for (const WindowRecord& r : store.user(u)) pre.push_back(&r);
  }
  const std::vector<int> sub =
      subsample_indices(pre.size(), static_cast<size_t>(ctx.cfg->intent_subsample),
                        derive_seed(ctx.cfg->seed, "mono.sub"));
  std::vector<const WindowRecord*> recs;
  recs.reserve(sub.size());
  for (int i : sub) recs.push_back(pre[static_cast<size_t>(i)]);

  const std::vector<WindowMat> xs = prepare_windows(recs, ctx.models->norm, dims);
  std::vector<int> ys;
  ys.reserve(recs.size());
  for (const WindowRecord* r : recs) ys.push_back(r->subaction == Subaction::Nio ? 0 : 1);

  IntentModel::Config mcfg;
  mcfg.backbone = Backbone::LstmCnn;
  mcfg.granularity = ctx.cfg->granularity;
  mcfg.num_classes_override = 2;
  mcfg.input_dim = static_cast<int>(dims.size());
  mcfg.steps = static_cast<int>(xs.front().rows());
  mcfg.seed = derive_seed(ctx.cfg->seed, "mono.init");
  IntentModel model(mcfg);
  TrainConfig tc;
  tc.max_epochs = ctx.cfg->intent_epochs;
  tc.batch_size = ctx.cfg->batch_size;
  tc.lr = ctx.cfg->lr;
  tc.patience = 0;
  tc.seed = derive_seed(ctx.cfg->seed, "mono.train");
  model.train(xs, ys, tc);

  const std::vector<WindowMat> txs = prepare_windows(*ctx.test_recs, ctx.models->norm, dims);
  const nn::Mat probs = model.predict_batch(txs);
  std::vector<int> preds;
  preds.reserve(txs.size());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    preds.push_back(probs(r, 1) >= probs(r, 0) ? 1 : 0);
  }
  return compute_metrics(preds, *ctx.y_true);
}

MetricsReport ae_anomaly(BaselineContext& ctx) {
  // Threshold at the 95th percentile of the AE's pretrain reconstruction
  // error (recomputed on the same subsample the AE trained on).
  WindowStore& store = *ctx.store;
  std::vector<const WindowRecord*> pre;
  for (const auto& u : ctx.fold->pretrain_users) {
    for (const WindowRecord& r : store.user(u)) pre.push_back(&r);
  }
  const std::vector<int> sub =
      subsample_indices(pre.size(), static_cast<size_t>(ctx.cfg->ae_subsample),
                        derive_seed(ctx.cfg->seed, "ae.sub"));
  std::vector<const WindowRecord*> recs;
  recs.reserve(sub.size());
  for (int i : sub) recs.push_back(pre[static_cast<size_t>(i)]);
  const std::vector<WindowMat> xs = prepare_windows(recs, ctx.models->norm, *ctx.id_dims);

  std::vector<double> train_err = reconstruction_errors(*ctx.models->ae, xs);
  std::sort(train_err.begin(), train_err.end());
  const size_t rank = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(train_err.size())));
  const double thr = train_err[std::min(train_err.size() - 1, rank == 0 ? 0 : rank - 1)];

  const std::vector<double> test_err =
      reconstruction_errors(*ctx.models->ae, *ctx.test_identity);
  std::vector<int> preds;
  preds.reserve(test_err.size());
  for (double e : test_err) preds.push_back(e > thr ? 1 : 0);
  return compute_metrics(preds, *ctx.y_true);
}

MetricsReport auth_only(BaselineContext& ctx) {
  // Identity branch alone: any non-owner verdict is IPI. The 0.5 cut-off is
  // the majority-vote fraction inside the TCM.
  return compute_metrics(ctx.test_eval->u_hat, *ctx.y_true);
}

MetricsReport har_only(BaselineContext& ctx) {
  std::vector<int> preds;
  preds.reserve(ctx.test_eval->smoothed.size());
  for (const IntentDistribution& d : ctx.test_eval->smoothed) {
    preds.push_back(topk(d, 1).front().first != d.nio_index ? 1 : 0);
  }
  return compute_metrics(preds, *ctx.y_true);
}

MetricsReport blackbox(BaselineContext& ctx, const std::string& kind) {
  std::vector<const WindowRecord*> recs;
  std::vector<int> y;
  blackbox_training_set(ctx, 2048, &recs, &y);
  if (recs.empty()) throw std::runtime_error("blackbox baseline: empty training set");
  const Eigen::MatrixXd X = fused_features(ctx, recs);
  const Eigen::MatrixXd Xt = fused_features(ctx, *ctx.test_recs);

  std::vector<int> preds(static_cast<size_t>(Xt.rows()), 0);
  if (kind == "mlp") {
    // MLP(64, 32) on the fused vector, 2-way softmax head.
    const uint64_t seed = derive_seed(ctx.cfg->seed, "bb.mlp");
    nn::Dense d1(static_cast<int>(X.cols()), 64, derive_seed(seed, "d1"), "d1");
    nn::Dense d2(64, 32, derive_seed(seed, "d2"), "d2");
    nn::Dense d3(32, 2, derive_seed(seed, "d3"), "d3");
    nn::ReLU r1, r2;
    std::vector<nn::Param*> params;
    for (auto* p : d1.params()) params.push_back(p);
    for (auto* p : d2.params()) params.push_back(p);
    for (auto* p : d3.params()) params.push_back(p);
    nn::Adam opt({1e-3f, 0.9f, 0.999f, 1e-8f});
    std::vector<int> order(recs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(seed, "shuffle"));
    const int epochs = 30;
    const size_t batch = 256;
    for (int e = 0; e < epochs; ++e) {
      std::shuffle(order.begin(), order.end(), rng);
      for (size_t off = 0; off < order.size(); off += batch) {
        const size_t end = std::min(order.size(), off + batch);
        nn::Mat xb(static_cast<Eigen::Index>(end - off), X.cols());
        std::vector<int> yb;
        for (size_t i = off; i < end; ++i) {
          xb.row(static_cast<Eigen::Index>(i - off)) =
              X.row(order[i]).cast<float>();
          yb.push_back(y[static_cast<size_t>(order[i])]);
        }
        for (auto* p : params) p->zero_grad();
        nn::Mat h = r2.forward(d2.forward(r1.forward(d1.forward(xb))));
        nn::Mat logits = d3.forward(h);
        nn::SoftmaxCE ce;
        ce.forward(logits, yb);
        d1.backward(r1.backward(d2.backward(r2.backward(d3.backward(ce.dlogits)))));
        opt.step(params);
      }
    }
    nn::Mat logits = d3.forward(r2.forward(d2.forward(r1.forward(d1.forward(Xt.cast<float>())))));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      preds[static_cast<size_t>(r)] = logits(r, 1) >= logits(r, 0) ? 1 : 0;
    }
  } else if (kind == "svm") {
    std::vector<int> pm;
    pm.reserve(y.size());
    bool has_pos = false, has_neg = false;
    for (int v : y) {
      pm.push_back(v == 1 ? 1 : -1);
      (v == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw std::runtime_error("blackbox_svm: single-class training set");
    ml::SvmConfig scfg = ctx.cfg->svm;
    scfg.seed = derive_seed(ctx.cfg->seed, "bb.svm");
    ml::RbfSvm svm;
    svm.fit(X, pm, scfg);
    for (Eigen::Index r = 0; r < Xt.rows(); ++r) {
      preds[static_cast<size_t>(r)] = svm.decision(Xt.row(r).transpose()) > 0.0 ? 1 : 0;
    }
  } else if (kind == "rf") {
    ml::RandomForest::Config rcfg;
    rcfg.n_trees = 100;
    rcfg.seed = derive_seed(ctx.cfg->seed, "bb.rf");
    ml::RandomForest rf;
    rf.fit(X, y, rcfg);
    for (Eigen::Index r = 0; r < Xt.rows(); ++r) {
      preds[static_cast<size_t>(r)] = rf.predict(Xt.row(r).transpose());
    }
  } else {
    throw std::invalid_argument("unknown blackbox kind: " + kind);
  }
  return compute_metrics(preds, *ctx.y_true);
}

}  // namespace

MetricsReport baseline_metrics(const std::string& name, BaselineContext& ctx) {
  if (name == "monolithic") return monolithic(ctx);
  if (name == "ae_anomaly") return ae_anomaly(ctx);
  if (name == "auth_only") return auth_only(ctx);
  if (name == "har_only") return har_only(ctx);
  if (name == "blackbox_mlp") return blackbox(ctx, "mlp");
  if (name == "blackbox_svm") return blackbox(ctx, "svm");
  if (name == "blackbox_rf") return blackbox(ctx, "rf");
  throw std::invalid_argument("unknown baseline: " + name);
}

}  // namespace ipd

#include "eval/ablations.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/util.hpp"
#include "eval/folds.hpp"
#include "ml/tree.hpp"

namespace ipd {

namespace {

std::vector<int> dim_range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

std::vector<int> dim_cat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct NamedDims {
  std::string label;
  std::vector<int> dims;
};

std::vector<NamedDims> identity_combos() {
  const auto imu = dim_range(0, 19);
  const auto sys = dim_range(19, 26);
  const auto intd = dim_range(26, 34);
  const auto app = dim_range(34, 40);
  return {{"IMU", imu},
          {"SYS", sys},
          {"INT", intd},
          {"APP", app},
          {"IMU+APP", dim_cat(imu, app)},
          {"IMU+SYS+APP", dim_cat(dim_cat(imu, sys), app)},
          {"ALL", dim_range(0, 40)},
          {"IMU+SYS", dim_range(0, 26)}};
}

std::vector<NamedDims> intent_combos() {
  const auto imu = dim_range(0, 19);
  const auto sys = dim_range(19, 26);
  const auto intd = dim_range(26, 34);
  const auto app = dim_range(34, 40);
  return {{"INT", intd},          {"APP", app},           {"IMU", imu},
          {"SYS", sys},           {"ALL", dim_range(0, 40)}, {"INT+APP", dim_range(26, 40)}};
}

std::vector<FoldSpec> selected_folds(const CorpusManifest& manifest,
                                     const AblationOptions& opt) {
  std::vector<FoldSpec> folds = make_folds(manifest);
  if (opt.fold_ids.empty()) return folds;
  std::vector<FoldSpec> out;
  for (const FoldSpec& f : folds) {
    if (std::find(opt.fold_ids.begin(), opt.fold_ids.end(), f.fold_id) != opt.fold_ids.end()) {
      out.push_back(f);
    }
  }
  if (out.empty()) throw std::invalid_argument("run_ablation: fold_ids select nothing");
  return out;
}

Aggregate agg_filtered(const std::vector<FoldSpec>& folds, const std::vector<double>& values,
                       const std::string& pair_type) {
  std::vector<double> v;
  for (size_t i = 0; i < folds.size(); ++i) {
    if (pair_type == "overall" || folds[i].pair_type == pair_type) v.push_back(values[i]);
  }
  return aggregate(v);
}

const std::vector<std::string> kPairCols = {"genuine", "synthetic", "overall"};

// ---- identity classifier-head variants ----

std::vector<WindowMat> residual_seqs(MultiHeadAE& ae, const std::vector<WindowMat>& windows) {
  std::vector<WindowMat> out;
  out.reserve(windows.size());
  constexpr size_t kChunk = 512;
  std::vector<int> idx;
  for (size_t off = 0; off < windows.size(); off += kChunk) {
    const size_t end = std::min(windows.size(), off + kChunk);
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    const nn::Seq x = make_batch(windows, idx);
    const nn::Seq recon = ae.reconstruct_batch(x);
    const size_t T = x.size();
    const auto B = x[0].rows();
    const auto D = x[0].cols();
    for (Eigen::Index b = 0; b < B; ++b) {
      WindowMat r(static_cast<Eigen::Index>(T), D);
      for (size_t t = 0; t < T; ++t) r.row(static_cast<Eigen::Index>(t)) = x[t].row(b) - recon[t].row(b);
      out.push_back(std::move(r));
    }
  }
  return out;
}

Eigen::MatrixXd dv_matrix(const std::vector<Eigen::VectorXd>& dvs) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(dvs.size()), dvs.front().size());
  for (size_t i = 0; i < dvs.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = dvs[i].transpose();
  return X;
}

// Two dense layers over the difference vector; returns non-owner scores.
std::vector<double> dense_head_scores(const std::vector<Eigen::VectorXd>& train,
                                      const std::vector<int>& y,
                                      const std::vector<Eigen::VectorXd>& test, uint64_t seed) {
  const int d = static_cast<int>(train.front().size());
  nn::Dense d1(d, 32, derive_seed(seed, "d1"), "d1");
  nn::Dense d2(32, 2, derive_seed(seed, "d2"), "d2");
  nn::ReLU r1;
  std::vector<nn::Param*> params;
  for (auto* p : d1.params()) params.push_back(p);
  for (auto* p : d2.params()) params.push_back(p);
  nn::Adam opt({1e-3f, 0.9f, 0.999f, 1e-8f});
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, "shuffle"));
  for (int e = 0; e < 100; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t off = 0; off < order.size(); off += 16) {
      const size_t end = std::min(order.size(), off + 16);
      nn::Mat xb(static_cast<Eigen::Index>(end - off), d);
      std::vector<int> yb;
      for (size_t i = off; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - off)) =
            train[static_cast<size_t>(order[i])].cast<float>().transpose();
        yb.push_back(y[static_cast<size_t>(order[i])]);
      }
      for (auto* p : params) p->zero_grad();
      nn::SoftmaxCE ce;
      ce.forward(d2.forward(r1.forward(d1.forward(xb))), yb);
      d1.backward(r1.backward(d2.backward(ce.dlogits)));
      opt.step(params);
    }
  }
  std::vector<double> scores;
  scores.reserve(test.size());
  for (const auto& v : test) {
    nn::Mat x(1, d);
    x.row(0) = v.cast<float>().transpose();
    const nn::Mat logits = d2.forward(r1.forward(d1.forward(x)));
    scores.push_back(static_cast<double>(logits(0, 1) - logits(0, 0)));
  }
  return scores;
}

// Multi-head LSTM (8 x 6 units, mirroring the AE encoder) over residual
// sequences; returns non-owner scores.
std::vector<double> lstm_head_scores(const std::vector<WindowMat>& train,
                                     const std::vector<int>& y,
                                     const std::vector<WindowMat>& test, uint64_t seed) {
  const int d = static_cast<int>(train.front().cols());
  constexpr int kHeads = 8, kUnits = 6;
  std::vector<nn::LSTMLayer> heads;
  heads.reserve(kHeads);
  for (int h = 0; h < kHeads; ++h) {
    heads.emplace_back(d, kUnits, derive_seed(seed, "lstm", static_cast<uint64_t>(h)),
                       "head" + std::to_string(h));
  }
  nn::Dense out(kHeads * kUnits, 2, derive_seed(seed, "out"), "out");
  std::vector<nn::Param*> params;
  for (auto& h : heads) {
    for (auto* p : h.params()) params.push_back(p);
  }
  for (auto* p : out.params()) params.push_back(p);
  nn::Adam opt({1e-3f, 0.9f, 0.999f, 1e-8f});

  auto forward = [&](const std::vector<WindowMat>& ws, const std::vector<int>& idx) {
    const nn::Seq x = make_batch(ws, idx);
    nn::Mat concat(x[0].rows(), kHeads * kUnits);
    for (int h = 0; h < kHeads; ++h) {
      const nn::Seq& hh = heads[static_cast<size_t>(h)].forward(x);
      concat.block(0, h * kUnits, x[0].rows(), kUnits) = hh.back();
    }
    return std::make_pair(concat, x.size());
  };

  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, "shuffle"));
  for (int e = 0; e < 60; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t off = 0; off < order.size(); off += 16) {
      const size_t end = std::min(order.size(), off + 16);
      std::vector<int> idx(order.begin() + static_cast<long>(off),
                           order.begin() + static_cast<long>(end));
      std::vector<int> yb;
      for (int i : idx) yb.push_back(y[static_cast<size_t>(i)]);
      for (auto* p : params) p->zero_grad();
      auto [concat, steps] = forward(train, idx);
      nn::SoftmaxCE ce;
      ce.forward(out.forward(concat), yb);
      const nn::Mat dconcat = out.backward(ce.dlogits);
      for (int h = 0; h < kHeads; ++h) {
        nn::Seq dh(steps);
        dh.back() = dconcat.block(0, h * kUnits, dconcat.rows(), kUnits);
        heads[static_cast<size_t>(h)].backward(dh);
      }
      opt.step(params);
    }
  }

  std::vector<double> scores;
  scores.reserve(test.size());
  constexpr size_t kChunk = 512;
  for (size_t off = 0; off < test.size(); off += kChunk) {
    const size_t end = std::min(test.size(), off + kChunk);
    std::vector<int> idx;
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    auto [concat, steps] = forward(test, idx);
    (void)steps;
    const nn::Mat logits = out.forward(concat);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      scores.push_back(static_cast<double>(logits(r, 1) - logits(r, 0)));
    }
  }
  return scores;
}

}  // namespace

MetricsReport identity_fold_with_head(WindowStore& store, const FoldSpec& fold,
                                      const PipelineConfig& cfg, const std::string& head_kind) {
  IdentityEvalData data = identity_eval_data(store, fold, cfg);
  const uint64_t seed = derive_seed(cfg.seed, "idhead." + head_kind);

  std::vector<double> scores;
  if (head_kind == "lstm") {
    std::vector<WindowMat> train = residual_seqs(*data.ae, data.owner_sel);
    std::vector<int> y(train.size(), 0);
    const std::vector<WindowMat> neg = residual_seqs(*data.ae, data.neg_sel);
    train.insert(train.end(), neg.begin(), neg.end());
    y.insert(y.end(), neg.size(), 1);
    const std::vector<WindowMat> test = residual_seqs(*data.ae, data.test_windows);
    scores = lstm_head_scores(train, y, test, seed);
  } else {
    std::vector<Eigen::VectorXd> train = difference_vectors(*data.ae, data.owner_sel);
    std::vector<int> y(train.size(), 0);
    const std::vector<Eigen::VectorXd> neg = difference_vectors(*data.ae, data.neg_sel);
    train.insert(train.end(), neg.begin(), neg.end());
    y.insert(y.end(), neg.size(), 1);
    const std::vector<Eigen::VectorXd> test = difference_vectors(*data.ae, data.test_windows);

    if (head_kind == "svm") {
      IdentityHead head;
      std::vector<Eigen::VectorXd> own(train.begin(),
                                       train.begin() + static_cast<long>(data.owner_sel.size()));
      head.fit(own, neg, cfg.svm);
      for (const auto& dv : test) scores.push_back(head.score(dv));
    } else if (head_kind == "rf") {
      ml::RandomForest::Config rcfg;
      rcfg.n_trees = 100;
      rcfg.seed = seed;
      ml::RandomForest rf;
      rf.fit(dv_matrix(train), y, rcfg);
      for (const auto& dv : test) scores.push_back(rf.predict_proba(dv) - 0.5);
    } else if (head_kind == "xgboost") {
      ml::GradientBoostedTrees::Config gcfg;
      gcfg.n_rounds = 100;
      gcfg.learning_rate = 0.1;
      gcfg.tree.max_depth = 6;
      gcfg.seed = seed;
      ml::GradientBoostedTrees gbt;
      gbt.fit(dv_matrix(train), y, gcfg);
      for (const auto& dv : test) scores.push_back(gbt.predict_proba(dv) - 0.5);
    } else if (head_kind == "dense") {
      scores = dense_head_scores(train, y, test, seed);
    } else {
      throw std::invalid_argument("unknown identity head kind: " + head_kind);
    }
  }

  std::vector<int> u_hat;
  if (cfg.use_tcm) {
    u_hat = tcm_identity(scores, cfg.tcm);
  } else {
    for (double s : scores) u_hat.push_back(s > 0.0 ? 1 : 0);
  }
  return compute_metrics(u_hat, data.owner_truth);
}

std::string AblationTable::to_text() const {
  std::string out = kind + " (" + metric + ")\n";
  char line[512];
  std::string header = "                    ";
  for (const auto& c : cols) {
    std::snprintf(line, sizeof(line), "%-16s", c.c_str());
    header += line;
  }
  out += header + "\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    std::snprintf(line, sizeof(line), "%-20s", rows[r].c_str());
    out += line;
    for (size_t c = 0; c < cols.size(); ++c) {
      const Aggregate& a = cells[r][c];
      char cell[64];
      if (a.count == 0) {
        std::snprintf(cell, sizeof(cell), "-");
      } else {
        std::snprintf(cell, sizeof(cell), "%.3f+-%.3f", a.mean, a.stddev);
      }
      std::snprintf(line, sizeof(line), "%-16s", cell);
      out += line;
    }
    out += "\n";
  }
  return out;
}

nn::json AblationTable::to_json() const {
  nn::json j;
  j["kind"] = kind;
  j["metric"] = metric;
  j["rows"] = rows;
  j["cols"] = cols;
  nn::json cj = nn::json::array();
  for (const auto& row : cells) {
    nn::json rj = nn::json::array();
    for (const Aggregate& a : row) {
      rj.push_back(nn::json{{"mean", a.mean}, {"stddev", a.stddev}, {"count", a.count}});
    }
    cj.push_back(rj);
  }
  j["cells"] = cj;
  return j;
}

std::vector<AblationTable> run_ablation(const std::string& kind,
                                        const CorpusManifest& manifest,
                                        const AblationOptions& opt) {
  const std::vector<FoldSpec> folds = selected_folds(manifest, opt);

  if (kind == "modality") {
    WindowStore store(manifest);
    AblationTable tid;
    tid.kind = "modality_identity";
    tid.metric = "identity_f1";
    const auto id_combos = identity_combos();
    for (const auto& c : id_combos) tid.cols.push_back(c.label);
    tid.rows = kPairCols;
    std::vector<std::vector<double>> per_combo;  // [combo][fold]
    for (const auto& combo : id_combos) {
      PipelineConfig cfg = opt.base;
      cfg.identity_dims = combo.dims;
      std::vector<double> f1;
      for (const FoldSpec& f : folds) f1.push_back(identity_only_fold(store, f, cfg).f1);
      per_combo.push_back(std::move(f1));
    }
    tid.cells.assign(tid.rows.size(), std::vector<Aggregate>(tid.cols.size()));
    for (size_t r = 0; r < tid.rows.size(); ++r) {
      for (size_t c = 0; c < tid.cols.size(); ++c) {
        tid.cells[r][c] = agg_filtered(folds, per_combo[c], tid.rows[r]);
      }
    }

    AblationTable tin;
    tin.kind = "modality_intent";
    tin.metric = "topk_accuracy";
    const auto in_combos = intent_combos();
    for (const auto& c : in_combos) tin.cols.push_back(c.label);
    tin.rows = {"top1", "top2", "top3"};
    tin.cells.assign(tin.rows.size(), std::vector<Aggregate>(tin.cols.size()));
    for (size_t c = 0; c < in_combos.size(); ++c) {
      PipelineConfig cfg = opt.base;
      cfg.intent_dims = in_combos[c].dims;
      std::vector<std::vector<double>> accs;  // [fold][k]
      for (const FoldSpec& f : folds) accs.push_back(intent_only_fold(store, f, cfg));
      for (size_t r = 0; r < tin.rows.size(); ++r) {
        std::vector<double> v;
        for (const auto& a : accs) {
          if (r < a.size()) v.push_back(a[r]);
        }
        tin.cells[r][c] = aggregate(v);
      }
    }
    return {tid, tin};
  }

  if (kind == "app_held_out") {
    WindowStore store(manifest);
    const std::vector<App> apps = {App::Amazon, App::Gmail,   App::Instagram,
                                   App::Slack,  App::Spotify, App::YouTube};
    AblationTable acc, drop;
    acc.kind = "app_held_out";
    acc.metric = "topk_accuracy";
    drop.kind = "app_held_out_drop";
    drop.metric = "topk_accuracy_drop";
    acc.rows = drop.rows = {"top1", "top2", "top3"};
    for (App a : apps) {
      acc.cols.emplace_back(name(a));
      drop.cols.emplace_back(name(a));
    }
    // Seen-apps reference run for the drop column.
    std::vector<std::vector<double>> base_accs;
    for (const FoldSpec& f : folds) base_accs.push_back(intent_only_fold(store, f, opt.base));

    acc.cells.assign(acc.rows.size(), std::vector<Aggregate>(acc.cols.size()));
    drop.cells.assign(drop.rows.size(), std::vector<Aggregate>(drop.cols.size()));
    for (size_t c = 0; c < apps.size(); ++c) {
      std::vector<std::vector<double>> accs;
      for (const FoldSpec& f : folds) {
        accs.push_back(intent_only_fold(store, f, opt.base, {apps[c]}));
      }
      for (size_t r = 0; r < acc.rows.size(); ++r) {
        std::vector<double> v, d;
        for (size_t i = 0; i < accs.size(); ++i) {
          if (r < accs[i].size()) {
            v.push_back(accs[i][r]);
            d.push_back(base_accs[i][r] - accs[i][r]);
          }
        }
        acc.cells[r][c] = aggregate(v);
        drop.cells[r][c] = aggregate(d);
      }
    }
    return {acc, drop};
  }

  if (kind == "rate_window") {
    AblationTable t;
    t.kind = "rate_window";
    t.metric = "identity_f1";
    char buf[32];
    for (double r : opt.rates) {
      std::snprintf(buf, sizeof(buf), "%gHz", r);
      t.rows.emplace_back(buf);
    }
    for (double s : opt.spans) {
      std::snprintf(buf, sizeof(buf), "%gs", s);
      t.cols.emplace_back(buf);
    }
    t.cells.assign(t.rows.size(), std::vector<Aggregate>(t.cols.size()));
    for (size_t ri = 0; ri < opt.rates.size(); ++ri) {
      for (size_t ci = 0; ci < opt.spans.size(); ++ci) {
        WindowOptions wopt;
        wopt.rate_hz = opt.rates[ri];
        wopt.span_s = opt.spans[ci];
        wopt.stride_s = 1.0;
        WindowStore store(manifest, wopt);
        std::vector<double> f1;
        for (const FoldSpec& f : folds) {
          f1.push_back(identity_only_fold(store, f, opt.base).f1);
        }
        t.cells[ri][ci] = aggregate(f1);
      }
    }
    return {t};
  }

  if (kind == "head_count") {
    WindowStore store(manifest);
    AblationTable t;
    t.kind = "head_count";
    t.metric = "identity_f1";
    t.cols = kPairCols;
    char buf[32];
    t.cells.assign(opt.head_counts.size(), std::vector<Aggregate>(t.cols.size()));
    for (size_t hi = 0; hi < opt.head_counts.size(); ++hi) {
      std::snprintf(buf, sizeof(buf), "%dH", opt.head_counts[hi]);
      t.rows.emplace_back(buf);
      PipelineConfig cfg = opt.base;
      cfg.ae_heads = opt.head_counts[hi];
      std::vector<double> f1;
      for (const FoldSpec& f : folds) f1.push_back(identity_only_fold(store, f, cfg).f1);
      for (size_t c = 0; c < t.cols.size(); ++c) {
        t.cells[hi][c] = agg_filtered(folds, f1, t.cols[c]);
      }
    }
    return {t};
  }

  if (kind == "id_classifier_head") {
    WindowStore store(manifest);
    AblationTable t;
    t.kind = "id_classifier_head";
    t.metric = "identity_f1";
    t.cols = kPairCols;
    t.rows = {"svm", "rf", "xgboost", "dense", "lstm"};
    t.cells.assign(t.rows.size(), std::vector<Aggregate>(t.cols.size()));
    for (size_t ri = 0; ri < t.rows.size(); ++ri) {
      std::vector<double> f1;
      for (const FoldSpec& f : folds) {
        f1.push_back(identity_fold_with_head(store, f, opt.base, t.rows[ri]).f1);
      }
      for (size_t c = 0; c < t.cols.size(); ++c) {
        t.cells[ri][c] = agg_filtered(folds, f1, t.cols[c]);
      }
    }
    return {t};
  }

  throw std::invalid_argument("unknown ablation kind: " + kind);
}

}  // namespace ipd

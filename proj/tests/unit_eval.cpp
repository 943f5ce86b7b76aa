#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "adapt/adapt.hpp"
#include "eval/baselines.hpp"
#include "eval/folds.hpp"
#include "eval/metrics.hpp"
#include "eval/results.hpp"
#include "eval/windows.hpp"
#include "gen/corpus.hpp"

using namespace ipd;
namespace fs = std::filesystem;

namespace {

// Exhaustive-count replica of the confusion-matrix metrics.
MetricsReport reference_metrics(const std::vector<int>& pred, const std::vector<int>& y) {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 1 && y[i] == 1) ++tp;
    if (pred[i] == 1 && y[i] == 0) ++fp;
    if (pred[i] == 0 && y[i] == 1) ++fn;
    if (pred[i] == 0 && y[i] == 0) ++tn;
  }
  MetricsReport m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  m.precision_defined = tp + fp > 0;
  m.recall_defined = tp + fn > 0;
  m.fpr_defined = fp + tn > 0;
  m.f1_defined = 2 * tp + fp + fn > 0;
  if (m.precision_defined) m.precision = static_cast<double>(tp) / (tp + fp);
  if (m.recall_defined) m.recall = static_cast<double>(tp) / (tp + fn);
  if (m.recall_defined) m.fnr = static_cast<double>(fn) / (tp + fn);
  if (m.fpr_defined) m.fpr = static_cast<double>(fp) / (fp + tn);
  if (m.f1_defined) m.f1 = 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(pred.size());
  return m;
}

void check_same(const MetricsReport& a, const MetricsReport& b) {
  CHECK(a.tp == b.tp);
  CHECK(a.fp == b.fp);
  CHECK(a.fn == b.fn);
  CHECK(a.tn == b.tn);
  CHECK(a.precision_defined == b.precision_defined);
  CHECK(a.recall_defined == b.recall_defined);
  CHECK(a.fpr_defined == b.fpr_defined);
  CHECK(a.f1_defined == b.f1_defined);
  CHECK(a.precision == b.precision);
  CHECK(a.recall == b.recall);
  CHECK(a.fpr == b.fpr);
  CHECK(a.fnr == b.fnr);
  CHECK(a.f1 == b.f1);
  CHECK(a.accuracy == b.accuracy);
}

CorpusManifest tiny_corpus() {
  static CorpusManifest m = [] {
    CorpusConfig cfg;
    cfg.n_users = 4;
    cfg.seed = 97;
    cfg.sigma_sig = 1.5;
    cfg.minutes_per_user = 6.0;
    cfg.n_genuine_pairs = 1;
    cfg.n_synthetic_pairs = 1;
    cfg.out_dir = "eval_data/corpus";
    if (fs::exists("eval_data/corpus/manifest.json")) return load_manifest(cfg.out_dir);
    return generate_corpus(cfg);
  }();
  return m;
}

WindowMat random_window(std::mt19937_64& rng, int steps = 6, int dim = 5) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  WindowMat w(steps, dim);
  for (int t = 0; t < steps; ++t) {
    for (int d = 0; d < dim; ++d) w(t, d) = g(rng);
  }
  return w;
}

}  // namespace

TEST_CASE("compute_metrics: hand-worked cases") {
  //               pred            label
  const std::vector<int> p = {1, 1, 0, 0, 1, 0};
  const std::vector<int> y = {1, 0, 1, 0, 1, 0};
  const MetricsReport m = compute_metrics(p, y);
  CHECK(m.tp == 2);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.tn == 2);
  CHECK(m.n() == 6);
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.fpr == doctest::Approx(1.0 / 3.0));
  CHECK(m.fnr == doctest::Approx(1.0 / 3.0));
  CHECK(m.accuracy == doctest::Approx(4.0 / 6.0));
  CHECK(m.precision_defined);
  CHECK(m.f1_defined);

  // All-negative predictions on all-negative labels: most ratios undefined.
  const MetricsReport z = compute_metrics({0, 0}, {0, 0});
  CHECK(z.tn == 2);
  CHECK(!z.precision_defined);
  CHECK(!z.recall_defined);
  CHECK(z.fpr_defined);
  CHECK(z.fpr == 0.0);
  CHECK(!z.f1_defined);
  CHECK(z.accuracy == 1.0);

  CHECK_THROWS(compute_metrics({1}, {1, 0}));
  CHECK_THROWS(compute_metrics({}, {}));
  CHECK_THROWS(compute_metrics({2}, {1}));
}

TEST_CASE("compute_metrics: randomized oracle over small confusion matrices") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 400; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<int> p, y;
    for (int i = 0; i < n; ++i) {
      p.push_back(static_cast<int>(rng() % 2));
      y.push_back(static_cast<int>(rng() % 2));
    }
    check_same(compute_metrics(p, y), reference_metrics(p, y));
  }
  // metrics_from_counts agrees with the vector path.
  const MetricsReport a = compute_metrics({1, 1, 0, 1}, {1, 0, 1, 1});
  const MetricsReport b = metrics_from_counts(a.tp, a.fp, a.fn, a.tn);
  check_same(a, b);
}

TEST_CASE("aggregate: population mean and stddev") {
  const Aggregate a = aggregate({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  CHECK(a.count == 8);
  CHECK(a.mean == doctest::Approx(5.0));
  CHECK(a.stddev == doctest::Approx(2.0));
  const Aggregate empty = aggregate({});
  CHECK(empty.count == 0);
  CHECK(empty.mean == 0.0);
}

TEST_CASE("make_folds: leave-two-out role assignment") {
  CorpusManifest m;
  m.seed = 5;
  for (int i = 0; i < 9; ++i) m.users.push_back(corpus_user_id(i));
  m.pairs.push_back({"u00", "u01", "genuine"});
  m.pairs.push_back({"u04", "u05", "synthetic"});
  m.pairs.push_back({"u07", "u02", "genuine"});

  const std::vector<FoldSpec> folds = make_folds(m, 240.0);
  REQUIRE(folds.size() == 3);
  for (size_t i = 0; i < folds.size(); ++i) {
    const FoldSpec& f = folds[i];
    CHECK(f.fold_id == static_cast<int>(i) + 1);
    CHECK(f.victim == m.pairs[i].victim);
    CHECK(f.abuser == m.pairs[i].abuser);
    CHECK(f.pair_type == m.pairs[i].pair_type);
    CHECK(f.snippet_seconds == 240.0);
    CHECK(f.finetune_users.size() == 3);
    CHECK(f.pretrain_users.size() == m.users.size() - 5);
    std::set<std::string> seen;
    for (const auto& u : f.pretrain_users) seen.insert(u);
    for (const auto& u : f.finetune_users) {
      CHECK(seen.count(u) == 0);  // disjoint from pretrain
      seen.insert(u);
    }
    CHECK(seen.count(f.victim) == 0);
    CHECK(seen.count(f.abuser) == 0);
    CHECK(seen.size() == m.users.size() - 2);
  }
  // Deterministic.
  const std::vector<FoldSpec> again = make_folds(m, 240.0);
  CHECK(again[1].pretrain_users == folds[1].pretrain_users);
  CHECK(again[1].finetune_users == folds[1].finetune_users);

  CorpusManifest no_pairs = m;
  no_pairs.pairs.clear();
  CHECK_THROWS(make_folds(no_pairs));
  CorpusManifest few = m;
  few.users.resize(4);  // 2 pair + 3 finetune needs at least 6 users
  CHECK_THROWS(make_folds(few));
}

TEST_CASE("window_session and WindowStore: ordering, caching and metadata") {
  const CorpusManifest m = tiny_corpus();
  WindowStore store(m);
  CHECK(store.options().rate_hz == kDefaultRateHz);

  const auto& recs = store.user("u01");
  REQUIRE(!recs.empty());
  double prev_t0 = -1.0, prev_start = -1.0;
  std::set<std::string> session_ids;
  for (const auto& r : recs) {
    CHECK(r.user_id == "u01");
    CHECK(r.features.rows() == kDefaultWindowSteps);
    CHECK(r.features.cols() == kFeatureDim);
    REQUIRE(r.session_t0 >= prev_t0);
    if (r.session_t0 > prev_t0) {
      prev_t0 = r.session_t0;
      prev_start = -1.0;
    }
    CHECK(r.t_start > prev_start);
    prev_start = r.t_start;
    CHECK(r.t_start >= r.session_t0);
    session_ids.insert(r.session_id);
  }
  // Each record's session exists in the manifest with matching labels.
  for (const SessionMeta* s : m.sessions_of("u01")) {
    if (!session_ids.count(s->session_id)) continue;  // too short to window
    for (const auto& r : recs) {
      if (r.session_id != s->session_id) continue;
      CHECK(r.subaction == s->subaction);
      CHECK(r.platform == s->platform);
      CHECK(r.session_t0 == doctest::Approx(s->t0).epsilon(1e-6));
    }
  }
  // The cache returns the identical object on a second call.
  const auto* p1 = &store.user("u01");
  const auto* p2 = &store.user("u01");
  CHECK(p1 == p2);

  // window_session on one meta agrees with the store slice for that session.
  const SessionMeta* first_meta = nullptr;
  for (const SessionMeta* s : m.sessions_of("u01")) {
    if (session_ids.count(s->session_id)) {
      first_meta = s;
      break;
    }
  }
  REQUIRE(first_meta != nullptr);
  const auto direct = window_session(m, *first_meta, store.options());
  size_t matched = 0;
  for (const auto& r : recs) {
    if (r.session_id != first_meta->session_id) continue;
    REQUIRE(matched < direct.size());
    CHECK((direct[matched].features - r.features).cwiseAbs().maxCoeff() == 0.0f);
    CHECK(direct[matched].t_start == r.t_start);
    ++matched;
  }
  CHECK(matched == direct.size());

  // record_label maps the session subaction through every granularity.
  const WindowRecord& r0 = recs.front();
  CHECK(record_label(r0, Granularity::Subaction) == static_cast<int>(r0.subaction));
  CHECK(record_label(r0, Granularity::Action) == static_cast<int>(action_of(r0.subaction)));
  CHECK(record_label(r0, Granularity::Category) ==
        static_cast<int>(category_of(action_of(r0.subaction))));
}

TEST_CASE("normalization: min-max fit with one-hot dims pinned") {
  std::mt19937_64 rng(11);
  std::vector<WindowRecord> recs(3);
  for (auto& r : recs) {
    r.features = WindowMat::Zero(4, kFeatureDim);
    for (int t = 0; t < 4; ++t) {
      for (int d = 0; d < kFeatureDim; ++d) {
        if (is_one_hot_dim(d)) {
          r.features(t, d) = (rng() % 2 == 0) ? 1.0f : 0.0f;
        } else {
          r.features(t, d) = static_cast<float>(static_cast<double>(rng() % 1000) / 100.0 - 5.0);
        }
      }
    }
  }
  std::vector<const WindowRecord*> ptrs;
  for (auto& r : recs) ptrs.push_back(&r);
  const NormalizationParams norm = fit_normalizer_records(ptrs);

  for (int d = 0; d < kFeatureDim; ++d) {
    if (is_one_hot_dim(d)) {
      CHECK(norm.min_max[static_cast<size_t>(d)].first == 0.0f);
      CHECK(norm.min_max[static_cast<size_t>(d)].second == 1.0f);
    } else {
      float lo = 1e9f, hi = -1e9f;
      for (const auto& r : recs) {
        for (int t = 0; t < 4; ++t) {
          lo = std::min(lo, r.features(t, d));
          hi = std::max(hi, r.features(t, d));
        }
      }
      CHECK(norm.min_max[static_cast<size_t>(d)].first == lo);
      CHECK(norm.min_max[static_cast<size_t>(d)].second == hi);
    }
  }

  // normalize_window maps min->0, max->1 and clamps nothing inside range.
  WindowMat w = recs[0].features;
  normalize_window(norm, w);
  for (int t = 0; t < 4; ++t) {
    for (int d = 0; d < kFeatureDim; ++d) {
      CHECK(w(t, d) >= 0.0f);
      CHECK(w(t, d) <= 1.0f);
      const auto [lo, hi] = norm.min_max[static_cast<size_t>(d)];
      if (hi > lo) {
        CHECK(w(t, d) ==
              doctest::Approx((recs[0].features(t, d) - lo) / (hi - lo)).epsilon(1e-5));
      }
    }
  }

  // prepare_windows = normalize + slice.
  const std::vector<int> dims = identity_default_dims();
  CHECK(dims.front() == 0);
  CHECK(dims.back() == kIdentityDim - 1);
  const std::vector<int> idims = intent_default_dims();
  CHECK(idims.front() == kIdentityDim);
  CHECK(idims.back() == kFeatureDim - 1);
  const auto prepped = prepare_windows(ptrs, norm, dims);
  REQUIRE(prepped.size() == 3);
  CHECK(prepped[0].cols() == static_cast<int>(dims.size()));
  WindowMat manual = recs[0].features;
  normalize_window(norm, manual);
  const WindowMat sliced = slice_dims(manual, dims);
  CHECK((prepped[0] - sliced).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("selection schemes: time, random, similarity and the m <= n_shots case") {
  std::mt19937_64 rng(21);
  std::vector<WindowMat> owners, pool;
  for (int i = 0; i < 40; ++i) owners.push_back(random_window(rng));
  for (int i = 0; i < 15; ++i) pool.push_back(random_window(rng));
  AdaptationConfig cfg;
  cfg.n_shots = 20;
  cfg.seed = 5;

  // Time: the first n_shots chronologically.
  cfg.scheme = SelectionScheme::Time;
  std::vector<int> want_time(20);
  std::iota(want_time.begin(), want_time.end(), 0);
  CHECK(select_calibration_windows(owners, pool, cfg) == want_time);

  // Random: deterministic per seed, n_shots distinct sorted indices.
  cfg.scheme = SelectionScheme::Random;
  const auto r1 = select_calibration_windows(owners, pool, cfg);
  CHECK(select_calibration_windows(owners, pool, cfg) == r1);
  REQUIRE(r1.size() == 20);
  CHECK(std::is_sorted(r1.begin(), r1.end()));
  CHECK(std::set<int>(r1.begin(), r1.end()).size() == 20);
  AdaptationConfig other_seed = cfg;
  other_seed.seed = 6;
  CHECK(select_calibration_windows(owners, pool, other_seed) != r1);
  CHECK(r1 != want_time);  // seeded shuffle is not the identity here

  // Similarity: replicate rank-then-slice (hard 30 / mid 50 / easy 20).
  cfg.scheme = SelectionScheme::Similarity;
  const auto sim = select_calibration_windows(owners, pool, cfg);
  REQUIRE(sim.size() == 20);
  {
    auto unit_flat = [](const WindowMat& w) {
      Eigen::VectorXd v(w.size());
      Eigen::Index k = 0;
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) v(k++) = static_cast<double>(w(r, c));
      }
      const double n = v.norm();
      if (n > 0.0) v /= n;
      return v;
    };
    std::vector<Eigen::VectorXd> nf;
    for (const auto& w : pool) nf.push_back(unit_flat(w));
    std::vector<std::pair<double, int>> ranked;
    for (int i = 0; i < static_cast<int>(owners.size()); ++i) {
      const Eigen::VectorXd v = unit_flat(owners[static_cast<size_t>(i)]);
      double s = 0.0;
      for (const auto& u : nf) s += v.dot(u);
      ranked.emplace_back(s / static_cast<double>(nf.size()), i);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const int m = static_cast<int>(owners.size());
    std::vector<int> want;
    for (int i = 0; i < 6; ++i) want.push_back(ranked[static_cast<size_t>(i)].second);
    const int mid_start = 6 + std::max(0, ((m - 4) - 6 - 10) / 2);
    for (int i = 0; i < 10; ++i) want.push_back(ranked[static_cast<size_t>(mid_start + i)].second);
    for (int i = m - 4; i < m; ++i) want.push_back(ranked[static_cast<size_t>(i)].second);
    std::sort(want.begin(), want.end());
    CHECK(sim == want);
  }
  AdaptationConfig no_pool = cfg;
  CHECK_THROWS(select_calibration_windows(owners, {}, no_pool));

  // Fewer owner windows than shots: everything is returned, any scheme.
  std::vector<WindowMat> few(owners.begin(), owners.begin() + 8);
  for (const auto scheme :
       {SelectionScheme::Random, SelectionScheme::Time, SelectionScheme::Similarity}) {
    AdaptationConfig c = cfg;
    c.scheme = scheme;
    const auto all = select_calibration_windows(few, pool, c);
    std::vector<int> want(8);
    std::iota(want.begin(), want.end(), 0);
    CHECK(all == want);
  }

  // select_adaptation_sets: negatives match owner count when the pool is
  // large enough (they are drawn without replacement, so a small pool caps
  // the count at its size).
  cfg.scheme = SelectionScheme::Random;
  std::vector<WindowMat> big_pool = pool;
  for (int i = 0; i < 15; ++i) big_pool.push_back(random_window(rng));
  const auto [own_idx, neg_idx] = select_adaptation_sets(owners, big_pool, cfg);
  CHECK(own_idx == select_calibration_windows(owners, big_pool, cfg));
  CHECK(neg_idx.size() == own_idx.size());
  std::set<int> distinct;
  for (int i : neg_idx) {
    CHECK(i >= 0);
    CHECK(i < static_cast<int>(big_pool.size()));
    distinct.insert(i);
  }
  CHECK(distinct.size() == neg_idx.size());
  const auto [own2, neg2] = select_adaptation_sets(owners, big_pool, cfg);
  CHECK(own2 == own_idx);
  CHECK(neg2 == neg_idx);
  const auto [own3, neg3] = select_adaptation_sets(owners, pool, cfg);
  CHECK(neg3.size() == pool.size());  // capped by the 15-window pool
}

TEST_CASE("adapt: fits a head on frozen-AE difference vectors") {
  MultiHeadAE::Config acfg;
  acfg.input_dim = 5;
  acfg.steps = 6;
  acfg.heads = 2;
  acfg.head_hidden = 3;
  acfg.decoder_hidden = 6;
  acfg.seed = 77;
  MultiHeadAE ae(acfg);

  std::mt19937_64 rng(31);
  std::vector<WindowMat> owners, pool;
  for (int i = 0; i < 30; ++i) owners.push_back(random_window(rng));
  for (int i = 0; i < 30; ++i) {
    WindowMat w = random_window(rng);
    w.array() += 2.0f;  // offset population so the head has signal
    pool.push_back(w);
  }

  const uint64_t before = ae.weights_hash();
  AdaptationConfig cfg;
  cfg.n_shots = 20;
  cfg.seed = 3;
  const AdaptResult res = adapt(ae, owners, pool, cfg);
  CHECK(ae.weights_hash() == before);  // AE untouched
  REQUIRE(res.head.fitted());
  CHECK(res.selected_owner.size() == 20);
  CHECK(res.selected_negative.size() == 20);

  // The head separates the two populations through the frozen AE.
  const auto odvs = difference_vectors(ae, owners);
  const auto pdvs = difference_vectors(ae, pool);
  int good = 0;
  for (const auto& d : odvs) good += res.head.predict(d).first == 0 ? 1 : 0;
  for (const auto& d : pdvs) good += res.head.predict(d).first == 1 ? 1 : 0;
  CHECK(good >= 54);  // 90% of 60

  // difference_vectors batches agree with the per-window reconstruct path.
  const auto one = difference_vectors(ae, {owners[0]}, 512);
  const auto [recon, mse] = ae.reconstruct(owners[0]);
  const Eigen::VectorXd manual = difference_vector(owners[0], recon);
  CHECK((one[0] - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fold results: json round-trip, cache paths, summary tables") {
  FoldResult r;
  r.fold_id = 4;
  r.victim = "u03";
  r.abuser = "u09";
  r.pair_type = "genuine";
  r.config_hash = 0xabcdef12u;
  r.threshold = 0.37;
  r.metrics = metrics_from_counts(10, 2, 3, 85);
  r.identity = metrics_from_counts(40, 1, 2, 57);
  KResult k1;
  k1.k = 1;
  k1.threshold = 0.41;
  k1.metrics = metrics_from_counts(9, 3, 4, 84);
  KResult k3;
  k3.k = 3;
  k3.threshold = 0.29;
  k3.metrics = metrics_from_counts(11, 1, 2, 86);
  r.k_sweep = {k1, k3};
  r.topk_accuracy = {0.81, 0.92, 0.97};
  r.intent_top1_raw = 0.78;
  r.ae_hash = 0x1234abcdull;
  r.baselines["auth_only"] = metrics_from_counts(5, 9, 8, 78);
  r.embed_euclidean = 1.25;
  r.embed_cosine = 0.41;
  r.embed_computed = true;
  DecisionRecord d;
  d.user_id = "u03";
  d.session_id = "u03-s001";
  d.t_start = 12.5;
  d.platform = App::Other;
  d.y_true = 1;
  d.u_hat = 1;
  d.identity_score = 0.82;
  d.fusion_score = 0.11;
  d.y_hat = 1;
  d.top_intents = {{0, 0.7}, {2, 0.2}};
  r.decisions.push_back(d);
  r.ae_log.train_loss = {0.5, 0.4};
  r.ae_log.epochs = 2;

  const nn::json j = fold_result_to_json(r);
  const FoldResult b = fold_result_from_json(j);
  CHECK(b.fold_id == r.fold_id);
  CHECK(b.victim == r.victim);
  CHECK(b.abuser == r.abuser);
  CHECK(b.pair_type == r.pair_type);
  CHECK(b.config_hash == r.config_hash);
  CHECK(b.threshold == r.threshold);
  check_same(b.metrics, r.metrics);
  check_same(b.identity, r.identity);
  REQUIRE(b.k_sweep.size() == 2);
  CHECK(b.k_sweep[1].k == 3);
  CHECK(b.k_sweep[1].threshold == 0.29);
  check_same(b.k_sweep[1].metrics, k3.metrics);
  CHECK(b.topk_accuracy == r.topk_accuracy);
  CHECK(b.intent_top1_raw == r.intent_top1_raw);
  CHECK(b.ae_hash == r.ae_hash);
  REQUIRE(b.baselines.count("auth_only") == 1);
  check_same(b.baselines.at("auth_only"), r.baselines.at("auth_only"));
  CHECK(b.embed_computed);
  CHECK(b.embed_euclidean == r.embed_euclidean);
  CHECK(b.embed_cosine == r.embed_cosine);
  REQUIRE(b.decisions.size() == 1);
  CHECK(b.decisions[0].session_id == d.session_id);
  CHECK(b.decisions[0].t_start == d.t_start);
  CHECK(b.decisions[0].fusion_score == d.fusion_score);
  CHECK(b.decisions[0].top_intents == d.top_intents);
  CHECK(b.ae_log.train_loss == r.ae_log.train_loss);

  // Decisions can be dropped on save.
  const FoldResult lean = fold_result_from_json(fold_result_to_json(r, false));
  CHECK(lean.decisions.empty());
  check_same(lean.metrics, r.metrics);

  // Cache path embeds fold id and config hash; save/load/exists round trip.
  const std::string path = fold_result_path("eval_data/results", 4, r.config_hash);
  CHECK(path.find("fold_04") != std::string::npos);
  CHECK(path.find("eval_data/results") == 0);
  fs::remove(path);  // stale cache from a previous test run
  CHECK(!fold_result_exists(path));
  save_fold_result(r, path);
  REQUIRE(fold_result_exists(path));
  const FoldResult loaded = load_fold_result(path);
  CHECK(loaded.fold_id == 4);
  check_same(loaded.metrics, r.metrics);

  // Summary tables mention the methods and k values they tabulate.
  FoldResult r2 = r;
  r2.fold_id = 5;
  r2.pair_type = "synthetic";
  const std::vector<FoldResult> folds = {r, r2};
  const std::string det = detection_table(folds);
  CHECK(det.find("method") != std::string::npos);
  CHECK(det.find("pipeline") != std::string::npos);
  CHECK(det.find("auth_only") != std::string::npos);
  const std::string topk = topk_table(folds);
  CHECK(topk.find("k") != std::string::npos);
  CHECK(topk.find("topk_acc") != std::string::npos);
  const std::string idt = identity_table(folds);
  CHECK(idt.find("pair_type") != std::string::npos);
  CHECK(idt.find("genuine") != std::string::npos);
  CHECK(idt.find("synthetic") != std::string::npos);
}

TEST_CASE("embedding_stats: hand-worked values and guards") {
  std::vector<Eigen::VectorXd> owners, attackers;
  Eigen::VectorXd e1(2), e2(2), z(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  z << 0.0, 0.0;
  owners = {e1, e2};
  attackers = {e1};
  const EmbeddingStats st = embedding_stats(owners, attackers);
  CHECK(st.pairs == 2);
  CHECK(st.euclidean == doctest::Approx((0.0 + std::sqrt(2.0)) / 2.0));
  CHECK(st.cosine == doctest::Approx(0.5));

  // Zero vectors contribute zero cosine rather than NaN.
  const EmbeddingStats zs = embedding_stats({z}, {e1});
  CHECK(zs.pairs == 1);
  CHECK(zs.cosine == 0.0);
  CHECK(zs.euclidean == doctest::Approx(1.0));

  const EmbeddingStats none = embedding_stats({}, {e1});
  CHECK(none.pairs == 0);
  CHECK(none.euclidean == 0.0);
}

#include "ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ipd::ml {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

int DecisionTree::build(const Eigen::MatrixXd& X, const std::vector<double>& target,
                        const std::vector<double>& weight, std::vector<int>& idx, int begin,
                        int end, int depth, const TreeConfig& cfg, bool classification,
                        std::mt19937_64& rng) {
  const int n = end - begin;
  double sum = 0.0, sum2 = 0.0, wsum = 0.0;
  for (int i = begin; i < end; ++i) {
    const double t = target[static_cast<size_t>(idx[static_cast<size_t>(i)])];
    sum += t;
    sum2 += t * t;
    wsum += weight[static_cast<size_t>(idx[static_cast<size_t>(i)])];
  }
  const double mean = sum / n;
  const double sse = sum2 - sum * sum / n;

  Node node;
  node.value = classification ? mean : sum / (wsum + 1.0);

  const bool terminal = depth >= cfg.max_depth || n < 2 * cfg.min_samples_leaf || sse < 1e-12;
  if (!terminal) {
    // Feature subset for this split.
    const int d = static_cast<int>(X.cols());
    const int m = cfg.features_per_split > 0 ? std::min(cfg.features_per_split, d) : d;
    std::vector<int> feats(static_cast<size_t>(d));
    std::iota(feats.begin(), feats.end(), 0);
    if (m < d) {
      for (int i = 0; i < m; ++i) {
        std::swap(feats[static_cast<size_t>(i)],
                  feats[static_cast<size_t>(i) + rng() % static_cast<uint64_t>(d - i)]);
      }
      feats.resize(static_cast<size_t>(m));
    }

    int best_feat = -1;
    double best_thr = 0.0, best_gain = 1e-10;
    std::vector<int> order(idx.begin() + begin, idx.begin() + end);
    for (int f : feats) {
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return X(a, f) < X(b, f); });
      double left_sum = 0.0, left_sum2 = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const double t = target[static_cast<size_t>(order[static_cast<size_t>(i)])];
        left_sum += t;
        left_sum2 += t * t;
        const int nl = i + 1, nr = n - nl;
        if (nl < cfg.min_samples_leaf || nr < cfg.min_samples_leaf) continue;
        const double xa = X(order[static_cast<size_t>(i)], f);
        const double xb = X(order[static_cast<size_t>(i + 1)], f);
        if (xb - xa < 1e-12) continue;
        const double right_sum = sum - left_sum;
        const double right_sum2 = sum2 - left_sum2;
        const double sse_l = left_sum2 - left_sum * left_sum / nl;
        const double sse_r = right_sum2 - right_sum * right_sum / nr;
        const double gain = sse - sse_l - sse_r;
        if (gain > best_gain) {
          best_gain = gain;
          best_feat = f;
          best_thr = 0.5 * (xa + xb);
        }
      }
    }

    if (best_feat >= 0) {
      auto mid_it = std::partition(idx.begin() + begin, idx.begin() + end,
                                   [&](int i) { return X(i, best_feat) <= best_thr; });
      const int mid = static_cast<int>(mid_it - idx.begin());
      if (mid > begin && mid < end) {
        node.feature = best_feat;
        node.threshold = best_thr;
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(X, target, weight, idx, begin, mid, depth + 1, cfg,
                               classification, rng);
        const int right = build(X, target, weight, idx, mid, end, depth + 1, cfg,
                                classification, rng);
        nodes_[static_cast<size_t>(self)].left = left;
        nodes_[static_cast<size_t>(self)].right = right;
        return self;
      }
    }
  }

  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  return self;
}

void DecisionTree::fit_classification(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                      const TreeConfig& cfg) {
  nodes_.clear();
  std::vector<double> target(y.size()), weight(y.size(), 1.0);
  for (size_t i = 0; i < y.size(); ++i) target[i] = static_cast<double>(y[i]);
  std::vector<int> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  build(X, target, weight, idx, 0, static_cast<int>(idx.size()), 0, cfg, true, rng);
}

void DecisionTree::fit_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
                                  const Eigen::VectorXd& hessian_weight, const TreeConfig& cfg) {
  nodes_.clear();
  std::vector<double> t(static_cast<size_t>(target.size())), w(static_cast<size_t>(target.size()));
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    t[static_cast<size_t>(i)] = target(i);
    w[static_cast<size_t>(i)] = hessian_weight(i);
  }
  std::vector<int> idx(t.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  build(X, t, w, idx, 0, static_cast<int>(idx.size()), 0, cfg, false, rng);
}

double DecisionTree::predict(const Eigen::VectorXd& x) const {
  if (nodes_.empty()) return 0.0;
  int cur = 0;
  while (nodes_[static_cast<size_t>(cur)].feature >= 0) {
    const Node& nd = nodes_[static_cast<size_t>(cur)];
    cur = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes_[static_cast<size_t>(cur)].value;
}

void RandomForest::fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const Config& cfg) {
  trees_.assign(static_cast<size_t>(cfg.n_trees), DecisionTree());
  const auto n = static_cast<Eigen::Index>(y.size());
  TreeConfig tree_cfg = cfg.tree;
  if (tree_cfg.features_per_split <= 0) {
    tree_cfg.features_per_split =
        std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(X.cols())))));
  }
  std::mt19937_64 rng(cfg.seed);
  Eigen::MatrixXd Xb(n, X.cols());
  std::vector<int> yb(static_cast<size_t>(n));
  for (int t = 0; t < cfg.n_trees; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pick = static_cast<Eigen::Index>(rng() % static_cast<uint64_t>(n));
      Xb.row(i) = X.row(pick);
      yb[static_cast<size_t>(i)] = y[static_cast<size_t>(pick)];
    }
    tree_cfg.seed = rng();
    trees_[static_cast<size_t>(t)].fit_classification(Xb, yb, tree_cfg);
  }
}

double RandomForest::predict_proba(const Eigen::VectorXd& x) const {
  if (trees_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

void GradientBoostedTrees::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                               const Config& cfg) {
  trees_.clear();
  lr_ = cfg.learning_rate;
  const auto n = static_cast<Eigen::Index>(y.size());
  double pos = 0.0;
  for (int v : y) pos += v;
  const double p0 = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  f0_ = std::log(p0 / (1.0 - p0));

  Eigen::VectorXd F = Eigen::VectorXd::Constant(n, f0_);
  std::mt19937_64 rng(cfg.seed);
  TreeConfig tree_cfg = cfg.tree;
  for (int round = 0; round < cfg.n_rounds; ++round) {
    Eigen::VectorXd residual(n), hess(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(F(i));
      residual(i) = static_cast<double>(y[static_cast<size_t>(i)]) - p;
      hess(i) = std::max(1e-6, p * (1.0 - p));
    }
    tree_cfg.seed = rng();
    DecisionTree tree;
    tree.fit_regression(X, residual, hess, tree_cfg);
    for (Eigen::Index i = 0; i < n; ++i) F(i) += lr_ * tree.predict(X.row(i));
    trees_.push_back(std::move(tree));
  }
}

double GradientBoostedTrees::predict_proba(const Eigen::VectorXd& x) const {
  double f = f0_;
  for (const auto& t : trees_) f += lr_ * t.predict(x);
  return sigmoid(f);
}

}  // namespace ipd::ml

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ipd::ml {

// Binary CART used in two modes: gini classification (labels 0/1) and
// mse regression (targets real). Nodes stored flat.
struct TreeConfig {
  int max_depth = 10;
  int min_samples_leaf = 2;
  int features_per_split = -1;  // -1: all features
  uint64_t seed = 1;
};

class DecisionTree {
 public:
  void fit_classification(const Eigen::MatrixXd& X, const std::vector<int>& y, const TreeConfig& cfg);
  void fit_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& target,
                      const Eigen::VectorXd& hessian_weight, const TreeConfig& cfg);
  // Classification: P(y=1). Regression: leaf value.
  double predict(const Eigen::VectorXd& x) const;

 private:
  struct Node {
    int feature = -1;      // -1 for leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;    // P(y=1) or regression value
  };
  std::vector<Node> nodes_;
  int build(const Eigen::MatrixXd& X, const std::vector<double>& target,
            const std::vector<double>& weight, std::vector<int>& idx, int begin, int end,
            int depth, const TreeConfig& cfg, bool classification, std::mt19937_64& rng);
};

class RandomForest {
 public:
  struct Config {
    int n_trees = 100;
    TreeConfig tree{12, 2, -1, 1};
    uint64_t seed = 1;
  };
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const Config& cfg);
  double predict_proba(const Eigen::VectorXd& x) const;  // P(y=1)
  int predict(const Eigen::VectorXd& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

 private:
  std::vector<DecisionTree> trees_;
};

// XGBoost-style binary logistic gradient boosting with Newton leaf weights.
class GradientBoostedTrees {
 public:
  struct Config {
    int n_rounds = 100;
    double learning_rate = 0.1;
    TreeConfig tree{3, 2, -1, 1};
    uint64_t seed = 1;
  };
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const Config& cfg);
  double predict_proba(const Eigen::VectorXd& x) const;
  int predict(const Eigen::VectorXd& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

 private:
  std::vector<DecisionTree> trees_;
  double f0_ = 0.0;
  double lr_ = 0.1;
};

}  // namespace ipd::ml

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nlohmann/json.hpp"

namespace ipd::ml {

// Two-class soft-margin SVM with RBF kernel, trained by SMO. Labels are
// +1 / -1; decision(x) > 0 predicts +1.
struct SvmConfig {
  double C = 10.0;
  double gamma = -1.0;  // <= 0: median-pairwise-distance heuristic at fit time
  double tol = 1e-3;
  int max_passes = 10;       // SMO sweeps without a change before stopping
  int max_iterations = 20000;
  uint64_t seed = 7;
};

class RbfSvm {
 public:
  // X: one row per sample. y entries must be +1 or -1, both classes present.
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const SvmConfig& cfg);
  double decision(const Eigen::VectorXd& x) const;  // signed score
  int predict(const Eigen::VectorXd& x) const { return decision(x) > 0.0 ? 1 : -1; }
  double gamma() const { return gamma_; }
  bool fitted() const { return sv_.rows() > 0; }

  nlohmann::ordered_json to_json() const;
  static RbfSvm from_json(const nlohmann::ordered_json& j);

 private:
  Eigen::MatrixXd sv_;        // support vectors (rows)
  Eigen::VectorXd alpha_y_;   // alpha_i * y_i per support vector
  double b_ = 0.0;
  double gamma_ = 1.0;
};

// Median of pairwise squared distances -> gamma = 1 / median_sq_dist.
double median_gamma(const Eigen::MatrixXd& X);

}  // namespace ipd::ml

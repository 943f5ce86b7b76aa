#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ml/svm.hpp"
#include "nn/serialize.hpp"

namespace ipd {

// Decision head over difference vectors: owner maps to the negative side of
// the RBF-SVM decision surface, non-owner to the positive side, so
// u_hat = 1 iff score > 0.
class IdentityHead {
 public:
  // Trains at a 1:1 balance; when the sets differ in size the larger one is
  // truncated to the smaller count (taking the leading entries, so callers
  // control ordering). Throws std::invalid_argument on an empty set.
  void fit(const std::vector<Eigen::VectorXd>& owner_dvs,
           const std::vector<Eigen::VectorXd>& other_dvs, const ml::SvmConfig& cfg = {});

  double score(const Eigen::VectorXd& dv) const { return svm_.decision(dv); }
  // (u_hat, signed score); u_hat = 1 iff score > 0.
  std::pair<int, double> predict(const Eigen::VectorXd& dv) const;
  bool fitted() const { return svm_.fitted(); }
  const ml::RbfSvm& svm() const { return svm_; }

  nn::json to_json() const;
  static IdentityHead from_json(const nn::json& j);

 private:
  ml::RbfSvm svm_;
};

}  // namespace ipd

#include "models/identity_head.hpp"

#include <algorithm>
#include <stdexcept>

namespace ipd {

void IdentityHead::fit(const std::vector<Eigen::VectorXd>& owner_dvs,
                       const std::vector<Eigen::VectorXd>& other_dvs, const ml::SvmConfig& cfg) {
  if (owner_dvs.empty() || other_dvs.empty()) {
    throw std::invalid_argument("IdentityHead::fit: both classes required");
  }
  const size_t n = std::min(owner_dvs.size(), other_dvs.size());
  const auto dim = owner_dvs.front().size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(2 * n), dim);
  std::vector<int> y(2 * n);
  for (size_t i = 0; i < n; ++i) {
    X.row(static_cast<Eigen::Index>(i)) = owner_dvs[i].transpose();
    y[i] = -1;  // owner
    X.row(static_cast<Eigen::Index>(n + i)) = other_dvs[i].transpose();
    y[n + i] = 1;  // non-owner
  }
  svm_.fit(X, y, cfg);
}

std::pair<int, double> IdentityHead::predict(const Eigen::VectorXd& dv) const {
  const double s = svm_.decision(dv);
  return {s > 0.0 ? 1 : 0, s};
}

nn::json IdentityHead::to_json() const {
  nn::json j;
  j["type"] = "identity_head";
  j["svm"] = svm_.to_json();
  return j;
}

IdentityHead IdentityHead::from_json(const nn::json& j) {
  if (j.at("type").get<std::string>() != "identity_head") {
    throw std::runtime_error("IdentityHead::from_json: wrong artifact type");
  }
  IdentityHead h;
  h.svm_ = ml::RbfSvm::from_json(j.at("svm"));
  return h;
}

}  // namespace ipd

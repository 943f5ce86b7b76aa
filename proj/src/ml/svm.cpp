#include "ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ipd::ml {

double median_gamma(const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  std::vector<double> d2;
  d2.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d2.push_back((X.row(i) - X.row(j)).squaredNorm());
    }
  }
  if (d2.empty()) return 1.0;
  std::nth_element(d2.begin(), d2.begin() + static_cast<long>(d2.size() / 2), d2.end());
  const double med = d2[d2.size() / 2];
  return med > 1e-12 ? 1.0 / med : 1.0;
}

void RbfSvm::fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const SvmConfig& cfg) {
  const auto n = X.rows();
  if (n == 0 || static_cast<size_t>(n) != y.size()) {
    throw std::invalid_argument("RbfSvm::fit: bad input sizes");
  }
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw std::invalid_argument("RbfSvm::fit: labels must be +1/-1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("RbfSvm::fit: need both classes");

  gamma_ = cfg.gamma > 0.0 ? cfg.gamma : median_gamma(X);

  // Full kernel matrix; the head never sees more than a few thousand samples.
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = std::exp(-gamma_ * (X.row(i) - X.row(j)).squaredNorm());
      K(i, j) = k;
      K(j, i) = k;
    }
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  double b = 0.0;
  std::mt19937_64 rng(cfg.seed);
  auto f = [&](Eigen::Index i) {
    double s = b;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (alpha(j) != 0.0) s += alpha(j) * y[static_cast<size_t>(j)] * K(i, j);
    }
    return s;
  };

  int passes = 0, iters = 0;
  while (passes < cfg.max_passes && iters < cfg.max_iterations) {
    int changed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      ++iters;
      const double yi = y[static_cast<size_t>(i)];
      const double Ei = f(i) - yi;
      if ((yi * Ei < -cfg.tol && alpha(i) < cfg.C) || (yi * Ei > cfg.tol && alpha(i) > 0)) {
        Eigen::Index j = static_cast<Eigen::Index>(rng() % static_cast<uint64_t>(n - 1));
        if (j >= i) ++j;
        const double yj = y[static_cast<size_t>(j)];
        const double Ej = f(j) - yj;
        const double ai_old = alpha(i), aj_old = alpha(j);
        double L, H;
        if (yi != yj) {
          L = std::max(0.0, aj_old - ai_old);
          H = std::min(cfg.C, cfg.C + aj_old - ai_old);
        } else {
          L = std::max(0.0, ai_old + aj_old - cfg.C);
          H = std::min(cfg.C, ai_old + aj_old);
        }
        if (L >= H) continue;
        const double eta = 2.0 * K(i, j) - K(i, i) - K(j, j);
        if (eta >= 0) continue;
        double aj = aj_old - yj * (Ei - Ej) / eta;
        aj = std::clamp(aj, L, H);
        if (std::abs(aj - aj_old) < 1e-7) continue;
        const double ai = ai_old + yi * yj * (aj_old - aj);
        alpha(i) = ai;
        alpha(j) = aj;
        const double b1 = b - Ei - yi * (ai - ai_old) * K(i, i) - yj * (aj - aj_old) * K(i, j);
        const double b2 = b - Ej - yi * (ai - ai_old) * K(i, j) - yj * (aj - aj_old) * K(j, j);
        if (ai > 0 && ai < cfg.C) b = b1;
        else if (aj > 0 && aj < cfg.C) b = b2;
        else b = 0.5 * (b1 + b2);
        ++changed;
      }
    }
    passes = changed == 0 ? passes + 1 : 0;
  }

  // Keep only support vectors.
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha(i) > 1e-9) sv.push_back(i);
  }
  if (sv.empty()) {
    // Degenerate but possible on identical classes: keep everything with
    // zero weight so decision() = b.
    sv_ = Eigen::MatrixXd::Zero(1, X.cols());
    alpha_y_ = Eigen::VectorXd::Zero(1);
    b_ = b;
    return;
  }
  sv_.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
  alpha_y_.resize(static_cast<Eigen::Index>(sv.size()));
  for (size_t k = 0; k < sv.size(); ++k) {
    sv_.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
    alpha_y_(static_cast<Eigen::Index>(k)) = alpha(sv[k]) * y[static_cast<size_t>(sv[k])];
  }
  b_ = b;
}

double RbfSvm::decision(const Eigen::VectorXd& x) const {
  double s = b_;
  for (Eigen::Index i = 0; i < sv_.rows(); ++i) {
    if (alpha_y_(i) != 0.0) {
      s += alpha_y_(i) * std::exp(-gamma_ * (sv_.row(i).transpose() - x).squaredNorm());
    }
  }
  return s;
}

nlohmann::ordered_json RbfSvm::to_json() const {
  nlohmann::ordered_json j;
  j["gamma"] = gamma_;
  j["b"] = b_;
  j["alpha_y"] = std::vector<double>(alpha_y_.data(), alpha_y_.data() + alpha_y_.size());
  j["sv_rows"] = sv_.rows();
  j["sv_cols"] = sv_.cols();
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(sv_.size()));
  for (Eigen::Index r = 0; r < sv_.rows(); ++r) {
    for (Eigen::Index c = 0; c < sv_.cols(); ++c) flat.push_back(sv_(r, c));
  }
  j["sv"] = std::move(flat);
  return j;
}

RbfSvm RbfSvm::from_json(const nlohmann::ordered_json& j) {
  RbfSvm s;
  s.gamma_ = j.at("gamma").get<double>();
  s.b_ = j.at("b").get<double>();
  const auto ay = j.at("alpha_y").get<std::vector<double>>();
  s.alpha_y_ = Eigen::Map<const Eigen::VectorXd>(ay.data(), static_cast<Eigen::Index>(ay.size()));
  const auto rows = j.at("sv_rows").get<Eigen::Index>();
  const auto cols = j.at("sv_cols").get<Eigen::Index>();
  const auto flat = j.at("sv").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw std::runtime_error("RbfSvm::from_json: sv size mismatch");
  }
  s.sv_.resize(rows, cols);
  size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) s.sv_(r, c) = flat[i++];
  }
  return s;
}

}  // namespace ipd::ml

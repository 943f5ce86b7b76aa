#include "ml/kmeans.hpp"

#include <limits>
#include <random>
#include <stdexcept>

namespace ipd::ml {

KMeansResult kmeans(const Eigen::MatrixXd& X, int k, uint64_t seed, int max_iters) {
  const auto n = X.rows();
  if (n == 0 || k < 1) throw std::invalid_argument("kmeans: empty input or k < 1");
  std::mt19937_64 rng(seed);

  KMeansResult res;
  res.centroids.resize(k, X.cols());
  // k-means++ seeding
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  res.centroids.row(0) = X.row(pick(rng));
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::max());
  for (int c = 1; c < k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (X.row(i) - res.centroids.row(c - 1)).squaredNorm());
    }
    const double total = d2.sum();
    if (total <= 1e-18) {
      // All points identical to chosen centroids; duplicate one.
      res.centroids.row(c) = res.centroids.row(0);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double r = u(rng), acc = 0.0;
    Eigen::Index chosen = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += d2(i);
      if (acc >= r) { chosen = i; break; }
    }
    res.centroids.row(c) = X.row(chosen);
  }

  res.assignments.assign(static_cast<size_t>(n), 0);
  for (int it = 0; it < max_iters; ++it) {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (X.row(i) - res.centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (X.row(i) - res.centroids.row(c)).squaredNorm();
        if (d < best_d) { best_d = d; best = c; }
      }
      if (res.assignments[static_cast<size_t>(i)] != best) {
        res.assignments[static_cast<size_t>(i)] = best;
        moved = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.assignments[static_cast<size_t>(i)]) += X.row(i);
      counts(res.assignments[static_cast<size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) res.centroids.row(c) = sums.row(c) / counts(c);
    }
    res.iterations = it + 1;
    if (!moved && it > 0) break;
  }
  return res;
}

}  // namespace ipd::ml

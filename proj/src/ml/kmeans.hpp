#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ipd::ml {

struct KMeansResult {
  Eigen::MatrixXd centroids;       // k rows
  std::vector<int> assignments;    // per input row
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding; deterministic for a fixed seed.
// If the points collapse to fewer than k distinct values, surplus clusters
// come back empty and all points land in the surviving ones.
KMeansResult kmeans(const Eigen::MatrixXd& X, int k, uint64_t seed, int max_iters = 100);

}  // namespace ipd::ml

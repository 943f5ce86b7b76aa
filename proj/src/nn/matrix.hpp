#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace ipd::nn {

using Mat = Eigen::MatrixXf;
// A time series batch, step-major: T entries of (batch x dim).
using Seq = std::vector<Mat>;

// Glorot/Xavier uniform initialization.
inline Mat glorot(int rows, int cols, std::mt19937_64& rng) {
  const float limit = std::sqrt(6.0f / static_cast<float>(rows + cols));
  std::uniform_real_distribution<float> u(-limit, limit);
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = u(rng);
  }
  return m;
}

}  // namespace ipd::nn

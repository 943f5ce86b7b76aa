#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nn/matrix.hpp"

namespace ipd::nn {

// One trainable tensor with its gradient accumulator and Adam state.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  Mat m;  // Adam first moment
  Mat v;  // Adam second moment

  void init(std::string n, Mat val) {
    name = std::move(n);
    value = std::move(val);
    grad = Mat::Zero(value.rows(), value.cols());
    m = Mat::Zero(value.rows(), value.cols());
    v = Mat::Zero(value.rows(), value.cols());
  }
  void zero_grad() { grad.setZero(); }
};

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // One update over all params; call after gradients are accumulated.
  void step(const std::vector<Param*>& params) {
    ++t_;
    const float bc1 = 1.0f - std::pow(cfg_.beta1, static_cast<float>(t_));
    const float bc2 = 1.0f - std::pow(cfg_.beta2, static_cast<float>(t_));
    for (Param* p : params) {
      p->m = cfg_.beta1 * p->m + (1.0f - cfg_.beta1) * p->grad;
      p->v = cfg_.beta2 * p->v + (1.0f - cfg_.beta2) * p->grad.cwiseProduct(p->grad);
      p->value.array() -=
          cfg_.lr * (p->m.array() / bc1) / ((p->v.array() / bc2).sqrt() + cfg_.eps);
    }
  }

  int iterations() const { return t_; }

 private:
  AdamConfig cfg_;
  int t_ = 0;
};

}  // namespace ipd::nn

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nn/matrix.hpp"
#include "nn/param.hpp"

namespace ipd::nn {

// All layers cache whatever the most recent forward() needs for backward().
// backward() returns the gradient w.r.t. the forward input and accumulates
// into Param::grad (callers zero_grad() between minibatches).

class Dense {
 public:
  Dense() = default;
  Dense(int in, int out, uint64_t seed, const std::string& name);
  Mat forward(const Mat& x);  // (B,in) -> (B,out)
  Mat backward(const Mat& dy);
  std::vector<Param*> params() { return {&w_, &b_}; }
  const Param& weight() const { return w_; }
  Param& weight() { return w_; }
  Param& bias() { return b_; }
  int in_dim() const { return static_cast<int>(w_.value.rows()); }
  int out_dim() const { return static_cast<int>(w_.value.cols()); }

 private:
  Param w_, b_;
  Mat x_;
};

class ReLU {
 public:
  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);

 private:
  Mat mask_;
};

class Dropout {
 public:
  Dropout(float rate, uint64_t seed) : rate_(rate), rng_(seed) {}
  Mat forward(const Mat& x, bool train);
  Mat backward(const Mat& dy);

 private:
  float rate_;
  std::mt19937_64 rng_;
  Mat mask_;
};

// Single-layer LSTM over a step-major sequence; returns all hidden states.
class LSTMLayer {
 public:
  LSTMLayer() = default;
  LSTMLayer(int input_dim, int hidden, uint64_t seed, const std::string& name);
  const Seq& forward(const Seq& x);
  // dh: per-step gradients w.r.t. hidden outputs (empty matrices = zero).
  Seq backward(const Seq& dh);
  std::vector<Param*> params() { return {&wx_, &wh_, &b_}; }
  int hidden() const { return hidden_; }
  int input_dim() const { return input_dim_; }
  Param& wx() { return wx_; }
  Param& wh() { return wh_; }
  Param& b() { return b_; }

 private:
  int input_dim_ = 0, hidden_ = 0;
  Param wx_;  // (input, 4H) gate order [i f g o]
  Param wh_;  // (H, 4H)
  Param b_;   // (1, 4H)
  Seq x_, h_, c_, gates_;  // caches (gates post-activation)
};

// 1-D convolution over the time axis, valid padding, stride 1.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(int in_channels, int filters, int kernel, uint64_t seed, const std::string& name);
  Seq forward(const Seq& x);  // T steps -> T-kernel+1 steps of (B, filters)
  Seq backward(const Seq& dy);
  std::vector<Param*> params() { return {&w_, &b_}; }
  int kernel() const { return kernel_; }
  Param& weight() { return w_; }
  Param& bias() { return b_; }

 private:
  int in_ = 0, filters_ = 0, kernel_ = 0;
  Param w_;  // (kernel*in, filters)
  Param b_;  // (1, filters)
  Seq x_;
};

// Elementwise max over pairs of consecutive steps (pool size 2, stride 2).
class MaxPool1d {
 public:
  Seq forward(const Seq& x);
  Seq backward(const Seq& dy);

 private:
  Seq x_;
  std::vector<Mat> takes_first_;  // 1.0 where the earlier step won
};

// Flatten a step-major sequence to (B, T*dim) and back.
Mat flatten_seq(const Seq& x);
Seq unflatten_seq(const Mat& x, int steps, int dim);

struct SoftmaxCE {
  // logits (B,C), labels length B. Returns mean cross-entropy; grad w.r.t.
  // logits stored in dlogits.
  float forward(const Mat& logits, const std::vector<int>& labels);
  Mat probs;
  Mat dlogits;
};

struct MSELoss {
  // Mean over all elements and steps; grad w.r.t. pred in dpred.
  float forward(const Seq& pred, const Seq& target);
  Seq dpred;
};

Mat softmax_rows(const Mat& logits);

}  // namespace ipd::nn

#pragma once

#include <cstdint>
#include <vector>

#include "nn/layers.hpp"
#include "nn/matrix.hpp"
#include "nn/param.hpp"

namespace ipd::nn {

// Per-row layer normalization over the feature axis, applied step by step.
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(int dim, const std::string& name);
  Seq forward(const Seq& x);
  Seq backward(const Seq& dy);
  std::vector<Param*> params() { return {&gamma_, &beta_}; }

 private:
  Param gamma_, beta_;
  Seq xhat_;
  std::vector<Mat> inv_std_;  // (B,1) per step
  static constexpr float kEps = 1e-5f;
};

// Dense applied independently at every step with shared weights.
class SeqDense {
 public:
  SeqDense() = default;
  SeqDense(int in, int out, uint64_t seed, const std::string& name);
  Seq forward(const Seq& x);
  Seq backward(const Seq& dy);
  std::vector<Param*> params() { return {&w_, &b_}; }
  Param& weight() { return w_; }
  Param& bias() { return b_; }

 private:
  Param w_, b_;
  Seq x_;
};

// Scaled dot-product multi-head self-attention (bidirectional, no mask).
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int model_dim, int n_heads, uint64_t seed, const std::string& name);
  Seq forward(const Seq& x);
  Seq backward(const Seq& dy);
  std::vector<Param*> params() { return {&wq_, &wk_, &wv_, &wo_}; }

 private:
  int dim_ = 0, heads_ = 0, dk_ = 0;
  Param wq_, wk_, wv_, wo_;
  // Sample-major caches: index b holds (T, dim) or per-head blocks.
  std::vector<Mat> xs_, qs_, ks_, vs_, concat_;
  std::vector<std::vector<Mat>> attn_;  // [b][head] -> (T,T) softmax weights
};

// Post-norm encoder block: x -> LN(x + MHA(x)) -> LN(.. + FFN(..)).
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(int model_dim, int n_heads, int ffn_dim, uint64_t seed, const std::string& name);
  Seq forward(const Seq& x);
  Seq backward(const Seq& dy);
  std::vector<Param*> params();

 private:
  MultiHeadAttention mha_;
  LayerNorm ln1_, ln2_;
  SeqDense ffn1_, ffn2_;
  Seq relu_mask_;
};

// Sinusoidal positional encoding added in place.
void add_positional_encoding(Seq& x);

}  // namespace ipd::nn

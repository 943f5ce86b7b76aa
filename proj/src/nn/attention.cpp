#include "nn/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace ipd::nn {

LayerNorm::LayerNorm(int dim, const std::string& name) {
  gamma_.init(name + ".gamma", Mat::Ones(1, dim));
  beta_.init(name + ".beta", Mat::Zero(1, dim));
}

Seq LayerNorm::forward(const Seq& x) {
  const auto T = x.size();
  const auto D = static_cast<float>(x[0].cols());
  xhat_.assign(T, Mat());
  inv_std_.assign(T, Mat());
  Seq y(T);
  for (size_t t = 0; t < T; ++t) {
    const Mat mu = x[t].rowwise().mean();
    Mat centered = x[t].colwise() - mu.col(0);
    Mat var = centered.cwiseProduct(centered).rowwise().sum() / D;
    inv_std_[t] = (var.array() + kEps).rsqrt();
    xhat_[t] = centered.array().colwise() * inv_std_[t].col(0).array();
    Mat out = xhat_[t];
    out.array().rowwise() *= gamma_.value.row(0).array();
    out.array().rowwise() += beta_.value.row(0).array();
    y[t] = std::move(out);
  }
  return y;
}

Seq LayerNorm::backward(const Seq& dy) {
  const auto T = dy.size();
  const auto D = static_cast<float>(dy[0].cols());
  Seq dx(T);
  for (size_t t = 0; t < T; ++t) {
    gamma_.grad.row(0) += dy[t].cwiseProduct(xhat_[t]).colwise().sum();
    beta_.grad.row(0) += dy[t].colwise().sum();
    Mat dxhat = dy[t];
    dxhat.array().rowwise() *= gamma_.value.row(0).array();
    const Mat m1 = dxhat.rowwise().mean();
    const Mat m2 = dxhat.cwiseProduct(xhat_[t]).rowwise().sum() / D;
    dx[t] = ((dxhat.colwise() - m1.col(0)) -
             (xhat_[t].array().colwise() * m2.col(0).array()).matrix())
                .array()
                .colwise() *
            inv_std_[t].col(0).array();
  }
  return dx;
}

SeqDense::SeqDense(int in, int out, uint64_t seed, const std::string& name) {
  std::mt19937_64 rng(seed);
  w_.init(name + ".w", glorot(in, out, rng));
  b_.init(name + ".b", Mat::Zero(1, out));
}

Seq SeqDense::forward(const Seq& x) {
  x_ = x;
  Seq y(x.size());
  for (size_t t = 0; t < x.size(); ++t) {
    y[t] = (x[t] * w_.value).rowwise() + b_.value.row(0);
  }
  return y;
}

Seq SeqDense::backward(const Seq& dy) {
  Seq dx(dy.size());
  for (size_t t = 0; t < dy.size(); ++t) {
    w_.grad.noalias() += x_[t].transpose() * dy[t];
    b_.grad.row(0) += dy[t].colwise().sum();
    dx[t] = dy[t] * w_.value.transpose();
  }
  return dx;
}

MultiHeadAttention::MultiHeadAttention(int model_dim, int n_heads, uint64_t seed,
                                       const std::string& name)
    : dim_(model_dim), heads_(n_heads), dk_(model_dim / n_heads) {
  if (model_dim % n_heads != 0) {
    throw std::invalid_argument("MultiHeadAttention: model_dim must divide by heads");
  }
  std::mt19937_64 rng(seed);
  wq_.init(name + ".wq", glorot(model_dim, model_dim, rng));
  wk_.init(name + ".wk", glorot(model_dim, model_dim, rng));
  wv_.init(name + ".wv", glorot(model_dim, model_dim, rng));
  wo_.init(name + ".wo", glorot(model_dim, model_dim, rng));
}

namespace {
// Step-major (T of B x D) <-> sample-major (B of T x D).
std::vector<Mat> to_samples(const Seq& x) {
  const auto T = x.size();
  const auto B = x[0].rows();
  const auto D = x[0].cols();
  std::vector<Mat> s(static_cast<size_t>(B), Mat(static_cast<Eigen::Index>(T), D));
  for (size_t t = 0; t < T; ++t) {
    for (Eigen::Index b = 0; b < B; ++b) {
      s[static_cast<size_t>(b)].row(static_cast<Eigen::Index>(t)) = x[t].row(b);
    }
  }
  return s;
}

Seq to_steps(const std::vector<Mat>& s) {
  const auto B = s.size();
  const auto T = s[0].rows();
  const auto D = s[0].cols();
  Seq x(static_cast<size_t>(T), Mat(static_cast<Eigen::Index>(B), D));
  for (Eigen::Index t = 0; t < T; ++t) {
    for (size_t b = 0; b < B; ++b) {
      x[static_cast<size_t>(t)].row(static_cast<Eigen::Index>(b)) = s[b].row(t);
    }
  }
  return x;
}
}  // namespace

Seq MultiHeadAttention::forward(const Seq& x) {
  xs_ = to_samples(x);
  const auto B = xs_.size();
  const float scale = 1.0f / std::sqrt(static_cast<float>(dk_));
  qs_.assign(B, Mat());
  ks_.assign(B, Mat());
  vs_.assign(B, Mat());
  concat_.assign(B, Mat());
  attn_.assign(B, {});
  std::vector<Mat> out(B);
  for (size_t b = 0; b < B; ++b) {
    const Mat& X = xs_[b];
    qs_[b] = X * wq_.value;
    ks_[b] = X * wk_.value;
    vs_[b] = X * wv_.value;
    const auto T = X.rows();
    Mat concat(T, dim_);
    attn_[b].resize(static_cast<size_t>(heads_));
    for (int h = 0; h < heads_; ++h) {
      const auto Q = qs_[b].block(0, h * dk_, T, dk_);
      const auto K = ks_[b].block(0, h * dk_, T, dk_);
      const auto V = vs_[b].block(0, h * dk_, T, dk_);
      Mat S = (Q * K.transpose()) * scale;
      Mat P = softmax_rows(S);
      concat.block(0, h * dk_, T, dk_) = P * V;
      attn_[b][static_cast<size_t>(h)] = std::move(P);
    }
    concat_[b] = std::move(concat);
    out[b] = concat_[b] * wo_.value;
  }
  return to_steps(out);
}

Seq MultiHeadAttention::backward(const Seq& dy) {
  const auto dys = to_samples(dy);
  const auto B = xs_.size();
  const float scale = 1.0f / std::sqrt(static_cast<float>(dk_));
  std::vector<Mat> dxs(B);
  for (size_t b = 0; b < B; ++b) {
    const Mat& X = xs_[b];
    const auto T = X.rows();
    wo_.grad.noalias() += concat_[b].transpose() * dys[b];
    const Mat dconcat = dys[b] * wo_.value.transpose();
    Mat dQ = Mat::Zero(T, dim_), dK = Mat::Zero(T, dim_), dV = Mat::Zero(T, dim_);
    for (int h = 0; h < heads_; ++h) {
      const auto Q = qs_[b].block(0, h * dk_, T, dk_);
      const auto K = ks_[b].block(0, h * dk_, T, dk_);
      const auto V = vs_[b].block(0, h * dk_, T, dk_);
      const Mat& P = attn_[b][static_cast<size_t>(h)];
      const auto dOh = dconcat.block(0, h * dk_, T, dk_);
      const Mat dP = dOh * V.transpose();
      // softmax backward, row-wise: dS = P o (dP - rowsum(P o dP))
      const Mat rowdot = P.cwiseProduct(dP).rowwise().sum();
      const Mat dS = P.cwiseProduct(dP.colwise() - rowdot.col(0));
      dV.block(0, h * dk_, T, dk_) = P.transpose() * dOh;
      dQ.block(0, h * dk_, T, dk_) = dS * K * scale;
      dK.block(0, h * dk_, T, dk_) = dS.transpose() * Q * scale;
    }
    wq_.grad.noalias() += X.transpose() * dQ;
    wk_.grad.noalias() += X.transpose() * dK;
    wv_.grad.noalias() += X.transpose() * dV;
    dxs[b] = dQ * wq_.value.transpose() + dK * wk_.value.transpose() + dV * wv_.value.transpose();
  }
  return to_steps(dxs);
}

TransformerBlock::TransformerBlock(int model_dim, int n_heads, int ffn_dim, uint64_t seed,
                                   const std::string& name)
    : mha_(model_dim, n_heads, seed, name + ".mha"),
      ln1_(model_dim, name + ".ln1"),
      ln2_(model_dim, name + ".ln2"),
      ffn1_(model_dim, ffn_dim, seed ^ 0x9e3779b9u, name + ".ffn1"),
      ffn2_(ffn_dim, model_dim, seed ^ 0x85ebca6bu, name + ".ffn2") {}

Seq TransformerBlock::forward(const Seq& x) {
  Seq a = mha_.forward(x);
  for (size_t t = 0; t < a.size(); ++t) a[t] += x[t];
  Seq n1 = ln1_.forward(a);

  Seq h = ffn1_.forward(n1);
  relu_mask_.assign(h.size(), Mat());
  for (size_t t = 0; t < h.size(); ++t) {
    relu_mask_[t] = (h[t].array() > 0.0f).cast<float>();
    h[t] = h[t].cwiseProduct(relu_mask_[t]);
  }
  Seq f = ffn2_.forward(h);
  for (size_t t = 0; t < f.size(); ++t) f[t] += n1[t];
  return ln2_.forward(f);
}

Seq TransformerBlock::backward(const Seq& dy) {
  Seq df = ln2_.backward(dy);
  Seq dh = ffn2_.backward(df);
  for (size_t t = 0; t < dh.size(); ++t) dh[t] = dh[t].cwiseProduct(relu_mask_[t]);
  Seq dn1 = ffn1_.backward(dh);
  for (size_t t = 0; t < dn1.size(); ++t) dn1[t] += df[t];  // residual
  Seq da = ln1_.backward(dn1);
  Seq dx = mha_.backward(da);
  for (size_t t = 0; t < dx.size(); ++t) dx[t] += da[t];  // residual
  return dx;
}

std::vector<Param*> TransformerBlock::params() {
  std::vector<Param*> out;
  for (auto* p : mha_.params()) out.push_back(p);
  for (auto* p : ln1_.params()) out.push_back(p);
  for (auto* p : ln2_.params()) out.push_back(p);
  for (auto* p : ffn1_.params()) out.push_back(p);
  for (auto* p : ffn2_.params()) out.push_back(p);
  return out;
}

void add_positional_encoding(Seq& x) {
  const auto T = x.size();
  const auto D = x[0].cols();
  for (size_t t = 0; t < T; ++t) {
    for (Eigen::Index d = 0; d < D; ++d) {
      const double angle =
          static_cast<double>(t) / std::pow(10000.0, 2.0 * static_cast<double>(d / 2) / static_cast<double>(D));
      const float v = d % 2 == 0 ? static_cast<float>(std::sin(angle)) : static_cast<float>(std::cos(angle));
      x[t].col(d).array() += v;
    }
  }
}

}  // namespace ipd::nn

#include "nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace ipd::nn {

Dense::Dense(int in, int out, uint64_t seed, const std::string& name) {
  std::mt19937_64 rng(seed);
  w_.init(name + ".w", glorot(in, out, rng));
  b_.init(name + ".b", Mat::Zero(1, out));
}

Mat Dense::forward(const Mat& x) {
  x_ = x;
  return (x * w_.value).rowwise() + b_.value.row(0);
}

Mat Dense::backward(const Mat& dy) {
  w_.grad.noalias() += x_.transpose() * dy;
  b_.grad.row(0) += dy.colwise().sum();
  return dy * w_.value.transpose();
}

Mat ReLU::forward(const Mat& x) {
  mask_ = (x.array() > 0.0f).cast<float>();
  return x.cwiseProduct(mask_);
}

Mat ReLU::backward(const Mat& dy) { return dy.cwiseProduct(mask_); }

Mat Dropout::forward(const Mat& x, bool train) {
  if (!train || rate_ <= 0.0f) {
    mask_ = Mat::Ones(x.rows(), x.cols());
    return x;
  }
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  mask_.resize(x.rows(), x.cols());
  const float keep = 1.0f - rate_;
  for (int c = 0; c < mask_.cols(); ++c) {
    for (int r = 0; r < mask_.rows(); ++r) {
      mask_(r, c) = u(rng_) < keep ? 1.0f / keep : 0.0f;
    }
  }
  return x.cwiseProduct(mask_);
}

Mat Dropout::backward(const Mat& dy) { return dy.cwiseProduct(mask_); }

LSTMLayer::LSTMLayer(int input_dim, int hidden, uint64_t seed, const std::string& name)
    : input_dim_(input_dim), hidden_(hidden) {
  std::mt19937_64 rng(seed);
  wx_.init(name + ".wx", glorot(input_dim, 4 * hidden, rng));
  wh_.init(name + ".wh", glorot(hidden, 4 * hidden, rng));
  b_.init(name + ".b", Mat::Zero(1, 4 * hidden));
  // Forget-gate bias 1.0: standard trick for stable early training.
  b_.value.block(0, hidden, 1, hidden).setOnes();
}

namespace {
inline Mat sigmoid(const Mat& x) { return (1.0f / (1.0f + (-x.array()).exp())).matrix(); }
}  // namespace

const Seq& LSTMLayer::forward(const Seq& x) {
  const auto T = x.size();
  if (T == 0) throw std::invalid_argument("LSTM: empty sequence");
  const auto B = x[0].rows();
  x_ = x;
  h_.assign(T, Mat());
  c_.assign(T, Mat());
  gates_.assign(T, Mat());
  Mat h_prev = Mat::Zero(B, hidden_);
  Mat c_prev = Mat::Zero(B, hidden_);
  const int H = hidden_;
  for (size_t t = 0; t < T; ++t) {
    Mat z = x[t] * wx_.value + h_prev * wh_.value;
    z.rowwise() += b_.value.row(0);
    Mat g(B, 4 * H);
    g.block(0, 0, B, H) = sigmoid(z.block(0, 0, B, H));          // i
    g.block(0, H, B, H) = sigmoid(z.block(0, H, B, H));          // f
    g.block(0, 2 * H, B, H) = z.block(0, 2 * H, B, H).array().tanh();  // g
    g.block(0, 3 * H, B, H) = sigmoid(z.block(0, 3 * H, B, H));  // o
    Mat c = g.block(0, H, B, H).cwiseProduct(c_prev) +
            g.block(0, 0, B, H).cwiseProduct(g.block(0, 2 * H, B, H));
    Mat h = g.block(0, 3 * H, B, H).cwiseProduct(c.array().tanh().matrix());
    gates_[t] = std::move(g);
    c_[t] = std::move(c);
    h_[t] = std::move(h);
    h_prev = h_[t];
    c_prev = c_[t];
  }
  return h_;
}

Seq LSTMLayer::backward(const Seq& dh) {
  const auto T = x_.size();
  const auto B = x_[0].rows();
  const int H = hidden_;
  Seq dx(T);
  Mat dh_next = Mat::Zero(B, H);
  Mat dc_next = Mat::Zero(B, H);
  for (size_t ti = T; ti-- > 0;) {
    const Mat& g = gates_[ti];
    const Mat& c = c_[ti];
    const Mat c_prev = ti == 0 ? Mat::Zero(B, H) : c_[ti - 1];
    const Mat h_prev = ti == 0 ? Mat::Zero(B, H) : h_[ti - 1];

    Mat dh_total = dh_next;
    if (dh[ti].size() > 0) dh_total += dh[ti];

    const auto i = g.block(0, 0, B, H).array();
    const auto f = g.block(0, H, B, H).array();
    const auto gg = g.block(0, 2 * H, B, H).array();
    const auto o = g.block(0, 3 * H, B, H).array();
    const auto tanh_c = c.array().tanh();

    Mat dc = dc_next;
    dc.array() += dh_total.array() * o * (1.0f - tanh_c.square());

    Mat dz(B, 4 * H);
    dz.block(0, 0, B, H).array() = dc.array() * gg * i * (1.0f - i);             // di
    dz.block(0, H, B, H).array() = dc.array() * c_prev.array() * f * (1.0f - f); // df
    dz.block(0, 2 * H, B, H).array() = dc.array() * i * (1.0f - gg.square());    // dg
    dz.block(0, 3 * H, B, H).array() = dh_total.array() * tanh_c * o * (1.0f - o);  // do

    wx_.grad.noalias() += x_[ti].transpose() * dz;
    wh_.grad.noalias() += h_prev.transpose() * dz;
    b_.grad.row(0) += dz.colwise().sum();

    dx[ti] = dz * wx_.value.transpose();
    dh_next = dz * wh_.value.transpose();
    dc_next = dc.cwiseProduct(g.block(0, H, B, H));
  }
  return dx;
}

Conv1d::Conv1d(int in_channels, int filters, int kernel, uint64_t seed, const std::string& name)
    : in_(in_channels), filters_(filters), kernel_(kernel) {
  std::mt19937_64 rng(seed);
  w_.init(name + ".w", glorot(kernel * in_channels, filters, rng));
  b_.init(name + ".b", Mat::Zero(1, filters));
}

Seq Conv1d::forward(const Seq& x) {
  const auto T = x.size();
  if (T < static_cast<size_t>(kernel_)) throw std::invalid_argument("Conv1d: sequence shorter than kernel");
  const auto B = x[0].rows();
  x_ = x;
  Seq y(T - static_cast<size_t>(kernel_) + 1);
  Mat window(B, kernel_ * in_);
  for (size_t t = 0; t < y.size(); ++t) {
    for (int k = 0; k < kernel_; ++k) {
      window.block(0, k * in_, B, in_) = x[t + static_cast<size_t>(k)];
    }
    y[t] = (window * w_.value).rowwise() + b_.value.row(0);
  }
  return y;
}

Seq Conv1d::backward(const Seq& dy) {
  const auto T = x_.size();
  const auto B = x_[0].rows();
  Seq dx(T, Mat::Zero(B, in_));
  Mat window(B, kernel_ * in_);
  for (size_t t = 0; t < dy.size(); ++t) {
    for (int k = 0; k < kernel_; ++k) {
      window.block(0, k * in_, B, in_) = x_[t + static_cast<size_t>(k)];
    }
    w_.grad.noalias() += window.transpose() * dy[t];
    b_.grad.row(0) += dy[t].colwise().sum();
    const Mat dwin = dy[t] * w_.value.transpose();
    for (int k = 0; k < kernel_; ++k) {
      dx[t + static_cast<size_t>(k)] += dwin.block(0, k * in_, B, in_);
    }
  }
  return dx;
}

Seq MaxPool1d::forward(const Seq& x) {
  x_ = x;
  const auto pairs = x.size() / 2;
  Seq y(pairs);
  takes_first_.assign(pairs, Mat());
  for (size_t p = 0; p < pairs; ++p) {
    const Mat& a = x[2 * p];
    const Mat& b = x[2 * p + 1];
    takes_first_[p] = (a.array() >= b.array()).cast<float>();
    y[p] = a.cwiseMax(b);
  }
  return y;
}

Seq MaxPool1d::backward(const Seq& dy) {
  Seq dx(x_.size(), Mat::Zero(x_[0].rows(), x_[0].cols()));
  for (size_t p = 0; p < dy.size(); ++p) {
    dx[2 * p] = dy[p].cwiseProduct(takes_first_[p]);
    dx[2 * p + 1] = dy[p].cwiseProduct((1.0f - takes_first_[p].array()).matrix());
  }
  return dx;
}

Mat flatten_seq(const Seq& x) {
  const auto T = x.size();
  const auto B = x[0].rows();
  const auto D = x[0].cols();
  Mat out(B, static_cast<Eigen::Index>(T) * D);
  for (size_t t = 0; t < T; ++t) out.block(0, static_cast<Eigen::Index>(t) * D, B, D) = x[t];
  return out;
}

Seq unflatten_seq(const Mat& x, int steps, int dim) {
  Seq out(static_cast<size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    out[static_cast<size_t>(t)] = x.block(0, t * dim, x.rows(), dim);
  }
  return out;
}

Mat softmax_rows(const Mat& logits) {
  Mat p = logits;
  for (int r = 0; r < p.rows(); ++r) {
    const float mx = p.row(r).maxCoeff();
    p.row(r) = (p.row(r).array() - mx).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

float SoftmaxCE::forward(const Mat& logits, const std::vector<int>& labels) {
  if (static_cast<size_t>(logits.rows()) != labels.size()) {
    throw std::invalid_argument("SoftmaxCE: batch size mismatch");
  }
  probs = softmax_rows(logits);
  const auto B = logits.rows();
  float loss = 0.0f;
  dlogits = probs;
  for (Eigen::Index r = 0; r < B; ++r) {
    const int y = labels[static_cast<size_t>(r)];
    if (y < 0 || y >= logits.cols()) throw std::invalid_argument("SoftmaxCE: label out of range");
    loss -= std::log(std::max(probs(r, y), 1e-12f));
    dlogits(r, y) -= 1.0f;
  }
  dlogits /= static_cast<float>(B);
  return loss / static_cast<float>(B);
}

float MSELoss::forward(const Seq& pred, const Seq& target) {
  if (pred.size() != target.size()) throw std::invalid_argument("MSE: step-count mismatch");
  const auto T = pred.size();
  const auto B = pred[0].rows();
  const auto D = pred[0].cols();
  const float denom = static_cast<float>(T) * static_cast<float>(B) * static_cast<float>(D);
  float loss = 0.0f;
  dpred.assign(T, Mat());
  for (size_t t = 0; t < T; ++t) {
    const Mat diff = pred[t] - target[t];
    loss += diff.squaredNorm();
    dpred[t] = 2.0f * diff / denom;
  }
  return loss / denom;
}

}  // namespace ipd::nn

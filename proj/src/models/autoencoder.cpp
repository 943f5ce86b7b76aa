#include "models/autoencoder.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/util.hpp"

namespace ipd {

using nn::Mat;
using nn::Seq;

Seq make_batch(const std::vector<WindowMat>& windows, const std::vector<int>& idx) {
  if (idx.empty()) throw std::invalid_argument("make_batch: empty index set");
  const auto T = windows[static_cast<size_t>(idx[0])].rows();
  const auto D = windows[static_cast<size_t>(idx[0])].cols();
  Seq x(static_cast<size_t>(T), Mat(static_cast<Eigen::Index>(idx.size()), D));
  for (size_t b = 0; b < idx.size(); ++b) {
    const WindowMat& w = windows[static_cast<size_t>(idx[b])];
    if (w.rows() != T || w.cols() != D) throw std::invalid_argument("make_batch: ragged windows");
    for (Eigen::Index t = 0; t < T; ++t) {
      x[static_cast<size_t>(t)].row(static_cast<Eigen::Index>(b)) = w.row(t);
    }
  }
  return x;
}

MultiHeadAE::MultiHeadAE(const Config& cfg) : cfg_(cfg) {
  heads_.reserve(static_cast<size_t>(cfg.heads));
  for (int h = 0; h < cfg.heads; ++h) {
    heads_.emplace_back(cfg.input_dim, cfg.head_hidden,
                        derive_seed(cfg.seed, "ae.head", static_cast<uint64_t>(h)),
                        "enc" + std::to_string(h));
  }
  const int latent = cfg.heads * cfg.head_hidden;
  decoder_ = nn::LSTMLayer(latent, cfg.decoder_hidden, derive_seed(cfg.seed, "ae.decoder"), "dec");
  out_ = nn::SeqDense(cfg.decoder_hidden, cfg.input_dim, derive_seed(cfg.seed, "ae.out"), "out");
}

Seq MultiHeadAE::forward(const Seq& x) {
  const auto B = x[0].rows();
  const int latent = cfg_.heads * cfg_.head_hidden;
  latent_cache_.resize(B, latent);
  for (int h = 0; h < cfg_.heads; ++h) {
    const Seq& hs = heads_[static_cast<size_t>(h)].forward(x);
    latent_cache_.block(0, h * cfg_.head_hidden, B, cfg_.head_hidden) = hs.back();
  }
  steps_cache_ = x.size();
  Seq dec_in(x.size(), latent_cache_);
  const Seq& dh = decoder_.forward(dec_in);
  return out_.forward(dh);
}

void MultiHeadAE::backward(const Seq& drecon) {
  Seq ddec_h = out_.backward(drecon);
  Seq ddec_in = decoder_.backward(ddec_h);
  const auto B = ddec_in[0].rows();
  Mat dlatent = Mat::Zero(B, cfg_.heads * cfg_.head_hidden);
  for (const Mat& d : ddec_in) dlatent += d;
  for (int h = 0; h < cfg_.heads; ++h) {
    Seq dh(steps_cache_);
    dh.back() = dlatent.block(0, h * cfg_.head_hidden, B, cfg_.head_hidden);
    heads_[static_cast<size_t>(h)].backward(dh);
  }
}

std::vector<nn::Param*> MultiHeadAE::params() {
  std::vector<nn::Param*> out;
  for (auto& h : heads_) {
    for (auto* p : h.params()) out.push_back(p);
  }
  for (auto* p : decoder_.params()) out.push_back(p);
  for (auto* p : out_.params()) out.push_back(p);
  return out;
}

TrainLog MultiHeadAE::train(const std::vector<WindowMat>& windows, const TrainConfig& tc) {
  if (windows.empty()) throw std::invalid_argument("MultiHeadAE::train: no windows");
  std::vector<int> train_idx, val_idx;
  for (size_t i = 0; i < windows.size(); ++i) {
    // Deterministic user-mixed validation split: every 10th window.
    if (tc.val_fraction > 0.0 && i % 10 == 9) val_idx.push_back(static_cast<int>(i));
    else train_idx.push_back(static_cast<int>(i));
  }
  if (train_idx.empty()) {
    train_idx = std::move(val_idx);
    val_idx.clear();
  }

  std::mt19937_64 rng(derive_seed(tc.seed, "ae.train"));
  nn::Adam opt({tc.lr, 0.9f, 0.999f, 1e-8f});
  const auto ps = params();

  TrainLog log;
  double best_val = std::numeric_limits<double>::max();
  int bad_epochs = 0;
  std::vector<Mat> best_weights;

  auto eval_loss = [&](const std::vector<int>& idx) {
    if (idx.empty()) return 0.0;
    double total = 0.0;
    size_t count = 0;
    for (size_t off = 0; off < idx.size(); off += static_cast<size_t>(tc.batch_size)) {
      const auto end = std::min(idx.size(), off + static_cast<size_t>(tc.batch_size));
      std::vector<int> chunk(idx.begin() + static_cast<long>(off), idx.begin() + static_cast<long>(end));
      Seq x = make_batch(windows, chunk);
      Seq recon = forward(x);
      nn::MSELoss mse;
      total += static_cast<double>(mse.forward(recon, x)) * static_cast<double>(chunk.size());
      count += chunk.size();
    }
    return total / static_cast<double>(count);
  };

  for (int epoch = 0; epoch < tc.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t off = 0; off < train_idx.size(); off += static_cast<size_t>(tc.batch_size)) {
      const auto end = std::min(train_idx.size(), off + static_cast<size_t>(tc.batch_size));
      std::vector<int> chunk(train_idx.begin() + static_cast<long>(off),
                             train_idx.begin() + static_cast<long>(end));
      Seq x = make_batch(windows, chunk);
      for (auto* p : ps) p->zero_grad();
      Seq recon = forward(x);
      nn::MSELoss mse;
      const float loss = mse.forward(recon, x);
      backward(mse.dpred);
      opt.step(ps);
      epoch_loss += static_cast<double>(loss) * static_cast<double>(chunk.size());
      seen += chunk.size();
    }
    log.train_loss.push_back(epoch_loss / static_cast<double>(seen));

    const double val = val_idx.empty() ? log.train_loss.back() : eval_loss(val_idx);
    log.val_loss.push_back(val);
    log.epochs = epoch + 1;
    if (tc.verbose) {
      std::fprintf(stderr, "[ae] epoch %d train %.6f val %.6f\n", epoch + 1,
                   log.train_loss.back(), val);
    }

    if (tc.patience > 0) {
      if (val < best_val - tc.min_delta) {
        best_val = val;
        bad_epochs = 0;
        best_weights.clear();
        for (auto* p : ps) best_weights.push_back(p->value);
      } else if (++bad_epochs >= tc.patience) {
        log.early_stopped = true;
        break;
      }
    }
  }
  if (!best_weights.empty()) {
    for (size_t i = 0; i < ps.size(); ++i) ps[i]->value = best_weights[i];
  }
  log_ = log;
  return log;
}

Seq MultiHeadAE::reconstruct_batch(const Seq& x) { return forward(x); }

nn::Mat MultiHeadAE::latent_batch(const Seq& x) {
  forward(x);
  return latent_cache_;
}

std::pair<WindowMat, double> MultiHeadAE::reconstruct(const WindowMat& window) {
  if (window.rows() != cfg_.steps || window.cols() != cfg_.input_dim) {
    throw std::invalid_argument("MultiHeadAE::reconstruct: shape mismatch");
  }
  std::vector<WindowMat> one = {window};
  Seq x = make_batch(one, {0});
  Seq recon = forward(x);
  WindowMat r(cfg_.steps, cfg_.input_dim);
  for (int t = 0; t < cfg_.steps; ++t) r.row(t) = recon[static_cast<size_t>(t)].row(0);
  double mse = 0.0;
  for (int t = 0; t < cfg_.steps; ++t) {
    for (int c = 0; c < cfg_.input_dim; ++c) {
      const double d = static_cast<double>(window(t, c)) - static_cast<double>(r(t, c));
      mse += d * d;
    }
  }
  mse /= static_cast<double>(cfg_.steps) * static_cast<double>(cfg_.input_dim);
  return {std::move(r), mse};
}

uint64_t MultiHeadAE::weights_hash() const {
  uint64_t h = 14695981039346656037ull;
  auto* self = const_cast<MultiHeadAE*>(this);
  for (const nn::Param* p : self->params()) {
    h = fnv1a64(p->value.data(), sizeof(float) * static_cast<size_t>(p->value.size()), h);
  }
  return h;
}

nn::json MultiHeadAE::to_json() const {
  nn::json j;
  j["type"] = "multi_head_ae";
  j["input_dim"] = cfg_.input_dim;
  j["steps"] = cfg_.steps;
  j["heads"] = cfg_.heads;
  j["head_hidden"] = cfg_.head_hidden;
  j["decoder_hidden"] = cfg_.decoder_hidden;
  j["seed"] = cfg_.seed;
  auto* self = const_cast<MultiHeadAE*>(this);
  nn::params_to_json(j, "params", self->params());
  return j;
}

std::unique_ptr<MultiHeadAE> MultiHeadAE::from_json(const nn::json& j) {
  if (j.at("type").get<std::string>() != "multi_head_ae") {
    throw std::runtime_error("MultiHeadAE::from_json: wrong artifact type");
  }
  Config cfg;
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.steps = j.at("steps").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.head_hidden = j.at("head_hidden").get<int>();
  cfg.decoder_hidden = j.at("decoder_hidden").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
  auto model = std::make_unique<MultiHeadAE>(cfg);
  nn::params_from_json(j, "params", model->params());
  return model;
}

Eigen::VectorXd difference_vector(const WindowMat& x, const WindowMat& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw std::invalid_argument("difference_vector: shape mismatch");
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      d(c) += static_cast<double>(x(t, c)) - static_cast<double>(xhat(t, c));
    }
  }
  return d / static_cast<double>(x.rows());
}

}  // namespace ipd

#include "models/intent.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/util.hpp"
#include "nn/serialize.hpp"

namespace ipd {

using nn::Mat;
using nn::Seq;

std::string backbone_name(Backbone b) {
  switch (b) {
    case Backbone::LstmCnn: return "lstm_cnn";
    case Backbone::Lstm: return "lstm";
    case Backbone::Cnn: return "cnn";
    case Backbone::Transformer: return "transformer";
  }
  return "lstm_cnn";
}

Backbone backbone_from_name(const std::string& n) {
  if (n == "lstm_cnn") return Backbone::LstmCnn;
  if (n == "lstm") return Backbone::Lstm;
  if (n == "cnn") return Backbone::Cnn;
  if (n == "transformer") return Backbone::Transformer;
  throw std::invalid_argument("unknown backbone: " + n);
}

IntentModel::IntentModel(const Config& cfg)
    : cfg_(cfg),
      drop1_(cfg.dropout, derive_seed(cfg.seed, "int.drop1")),
      drop2_(cfg.dropout, derive_seed(cfg.seed, "int.drop2")) {
  const int C = num_classes();
  int concat_dim = 0;
  switch (cfg.backbone) {
    case Backbone::LstmCnn: {
      lstm_ = nn::LSTMLayer(cfg.input_dim, cfg.lstm_units, derive_seed(cfg.seed, "int.lstm"), "lstm");
      conv1_ = nn::Conv1d(cfg.input_dim, cfg.conv_filters, cfg.conv_kernel,
                          derive_seed(cfg.seed, "int.conv1"), "conv1");
      const int conv_steps = (cfg.steps - cfg.conv_kernel + 1) / 2;
      lstm_dim_ = cfg.lstm_units;
      flat_steps_ = conv_steps;
      flat_dim_ = conv_steps * cfg.conv_filters;
      concat_dim = lstm_dim_ + flat_dim_;
      break;
    }
    case Backbone::Lstm: {
      lstm_ = nn::LSTMLayer(cfg.input_dim, cfg.lstm_units, derive_seed(cfg.seed, "int.lstm"), "lstm");
      lstm_dim_ = cfg.lstm_units;
      concat_dim = lstm_dim_;
      break;
    }
    case Backbone::Cnn: {
      conv1_ = nn::Conv1d(cfg.input_dim, cfg.conv_filters, cfg.conv_kernel,
                          derive_seed(cfg.seed, "int.conv1"), "conv1");
      conv2_ = nn::Conv1d(cfg.conv_filters, cfg.conv_filters, cfg.conv_kernel,
                          derive_seed(cfg.seed, "int.conv2"), "conv2");
      const int s1 = (cfg.steps - cfg.conv_kernel + 1) / 2;
      const int s2 = (s1 - cfg.conv_kernel + 1) / 2;
      flat_steps_ = s2;
      flat_dim_ = s2 * cfg.conv_filters;
      concat_dim = flat_dim_;
      break;
    }
    case Backbone::Transformer: {
      embed_ = nn::SeqDense(cfg.input_dim, cfg.tf_dim, derive_seed(cfg.seed, "int.embed"), "embed");
      blocks_.reserve(static_cast<size_t>(cfg.tf_blocks));
      for (int b = 0; b < cfg.tf_blocks; ++b) {
        blocks_.emplace_back(cfg.tf_dim, cfg.tf_heads, 2 * cfg.tf_dim,
                             derive_seed(cfg.seed, "int.block", static_cast<uint64_t>(b)),
                             "block" + std::to_string(b));
      }
      concat_dim = cfg.tf_dim;
      break;
    }
  }
  dense1_ = nn::Dense(concat_dim, cfg.dense_units, derive_seed(cfg.seed, "int.dense1"), "dense1");
  dense2_ = nn::Dense(cfg.dense_units, C, derive_seed(cfg.seed, "int.dense2"), "dense2");
}

Mat IntentModel::forward(const Seq& x, bool train) {
  const auto B = x[0].rows();
  Mat concat;
  switch (cfg_.backbone) {
    case Backbone::LstmCnn: {
      const Seq& h = lstm_.forward(x);
      Seq c = conv1_.forward(x);
      conv1_mask_.assign(c.size(), Mat());
      for (size_t t = 0; t < c.size(); ++t) {
        conv1_mask_[t] = (c[t].array() > 0.0f).cast<float>();
        c[t] = c[t].cwiseProduct(conv1_mask_[t]);
      }
      const Seq p = pool1_.forward(c);
      const Mat flat = nn::flatten_seq(p);
      concat.resize(B, lstm_dim_ + flat_dim_);
      concat.block(0, 0, B, lstm_dim_) = h.back();
      concat.block(0, lstm_dim_, B, flat_dim_) = flat;
      break;
    }
    case Backbone::Lstm: {
      const Seq& h = lstm_.forward(x);
      concat = h.back();
      break;
    }
    case Backbone::Cnn: {
      Seq c = conv1_.forward(x);
      conv1_mask_.assign(c.size(), Mat());
      for (size_t t = 0; t < c.size(); ++t) {
        conv1_mask_[t] = (c[t].array() > 0.0f).cast<float>();
        c[t] = c[t].cwiseProduct(conv1_mask_[t]);
      }
      Seq p1 = pool1_.forward(c);
      Seq c2 = conv2_.forward(p1);
      conv2_mask_.assign(c2.size(), Mat());
      for (size_t t = 0; t < c2.size(); ++t) {
        conv2_mask_[t] = (c2[t].array() > 0.0f).cast<float>();
        c2[t] = c2[t].cwiseProduct(conv2_mask_[t]);
      }
      const Seq p2 = pool2_.forward(c2);
      concat = nn::flatten_seq(p2);
      break;
    }
    case Backbone::Transformer: {
      Seq e = embed_.forward(x);
      nn::add_positional_encoding(e);
      tf_steps_ = e.size();
      for (auto& blk : blocks_) e = blk.forward(e);
      concat = Mat::Zero(B, cfg_.tf_dim);
      for (const Mat& step : e) concat += step;
      concat /= static_cast<float>(e.size());
      break;
    }
  }
  Mat d0 = drop1_.forward(concat, train);
  Mat z1 = dense1_.forward(d0);
  Mat a1 = relu1_.forward(z1);
  penultimate_cache_ = a1;
  Mat d1 = drop2_.forward(a1, train);
  return dense2_.forward(d1);
}

void IntentModel::backward(const Mat& dlogits) {
  Mat da1 = drop2_.backward(dense2_.backward(dlogits));
  Mat dz1 = relu1_.backward(da1);
  Mat dconcat = drop1_.backward(dense1_.backward(dz1));
  const auto B = dconcat.rows();
  switch (cfg_.backbone) {
    case Backbone::LstmCnn: {
      Seq dh(static_cast<size_t>(cfg_.steps));
      dh.back() = dconcat.block(0, 0, B, lstm_dim_);
      lstm_.backward(dh);
      const Mat dflat = dconcat.block(0, lstm_dim_, B, flat_dim_);
      Seq dp = nn::unflatten_seq(dflat, flat_steps_, cfg_.conv_filters);
      Seq dc = pool1_.backward(dp);
      for (size_t t = 0; t < dc.size(); ++t) dc[t] = dc[t].cwiseProduct(conv1_mask_[t]);
      conv1_.backward(dc);
      break;
    }
    case Backbone::Lstm: {
      Seq dh(static_cast<size_t>(cfg_.steps));
      dh.back() = dconcat;
      lstm_.backward(dh);
      break;
    }
    case Backbone::Cnn: {
      Seq dp2 = nn::unflatten_seq(dconcat, flat_steps_, cfg_.conv_filters);
      Seq dc2 = pool2_.backward(dp2);
      for (size_t t = 0; t < dc2.size(); ++t) dc2[t] = dc2[t].cwiseProduct(conv2_mask_[t]);
      Seq dp1 = conv2_.backward(dc2);
      Seq dc1 = pool1_.backward(dp1);
      for (size_t t = 0; t < dc1.size(); ++t) dc1[t] = dc1[t].cwiseProduct(conv1_mask_[t]);
      conv1_.backward(dc1);
      break;
    }
    case Backbone::Transformer: {
      Seq de(tf_steps_, dconcat / static_cast<float>(tf_steps_));
      for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) de = it->backward(de);
      embed_.backward(de);
      break;
    }
  }
}

std::vector<nn::Param*> IntentModel::params() {
  std::vector<nn::Param*> out;
  switch (cfg_.backbone) {
    case Backbone::LstmCnn:
      for (auto* p : lstm_.params()) out.push_back(p);
      for (auto* p : conv1_.params()) out.push_back(p);
      break;
    case Backbone::Lstm:
      for (auto* p : lstm_.params()) out.push_back(p);
      break;
    case Backbone::Cnn:
      for (auto* p : conv1_.params()) out.push_back(p);
      for (auto* p : conv2_.params()) out.push_back(p);
      break;
    case Backbone::Transformer:
      for (auto* p : embed_.params()) out.push_back(p);
      for (auto& b : blocks_) {
        for (auto* p : b.params()) out.push_back(p);
      }
      break;
  }
  for (auto* p : dense1_.params()) out.push_back(p);
  for (auto* p : dense2_.params()) out.push_back(p);
  return out;
}

TrainLog IntentModel::train(const std::vector<WindowMat>& windows, const std::vector<int>& labels,
                            const TrainConfig& tc) {
  if (windows.empty() || windows.size() != labels.size()) {
    throw std::invalid_argument("IntentModel::train: bad input sizes");
  }
  const int C = num_classes();
  for (int l : labels) {
    if (l < 0 || l >= C) throw std::invalid_argument("IntentModel::train: label outside granularity");
  }
  std::vector<int> idx(windows.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(derive_seed(tc.seed, "int.train"));
  nn::Adam opt({tc.lr, 0.9f, 0.999f, 1e-8f});
  const auto ps = params();

  TrainLog log;
  for (int epoch = 0; epoch < tc.max_epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t off = 0; off < idx.size(); off += static_cast<size_t>(tc.batch_size)) {
      const auto end = std::min(idx.size(), off + static_cast<size_t>(tc.batch_size));
      std::vector<int> chunk(idx.begin() + static_cast<long>(off), idx.begin() + static_cast<long>(end));
      std::vector<int> chunk_labels;
      chunk_labels.reserve(chunk.size());
      for (int i : chunk) chunk_labels.push_back(labels[static_cast<size_t>(i)]);
      Seq x = make_batch(windows, chunk);
      for (auto* p : ps) p->zero_grad();
      Mat logits = forward(x, true);
      nn::SoftmaxCE ce;
      const float loss = ce.forward(logits, chunk_labels);
      backward(ce.dlogits);
      opt.step(ps);
      epoch_loss += static_cast<double>(loss) * static_cast<double>(chunk.size());
      seen += chunk.size();
    }
    log.train_loss.push_back(epoch_loss / static_cast<double>(seen));
    log.epochs = epoch + 1;
    if (tc.verbose) {
      std::fprintf(stderr, "[intent] epoch %d loss %.6f\n", epoch + 1, log.train_loss.back());
    }
  }
  log_ = log;
  return log;
}

nn::Mat IntentModel::predict_batch(const std::vector<WindowMat>& windows) {
  const int C = num_classes();
  Mat out(static_cast<Eigen::Index>(windows.size()), C);
  constexpr size_t kChunk = 512;
  std::vector<int> idx;
  for (size_t off = 0; off < windows.size(); off += kChunk) {
    const auto end = std::min(windows.size(), off + kChunk);
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    Seq x = make_batch(windows, idx);
    Mat logits = forward(x, false);
    Mat probs = nn::softmax_rows(logits);
    out.block(static_cast<Eigen::Index>(off), 0, probs.rows(), C) = probs;
  }
  return out;
}

nn::Mat IntentModel::penultimate_batch(const std::vector<WindowMat>& windows) {
  Mat out(static_cast<Eigen::Index>(windows.size()), cfg_.dense_units);
  constexpr size_t kChunk = 512;
  std::vector<int> idx;
  for (size_t off = 0; off < windows.size(); off += kChunk) {
    const auto end = std::min(windows.size(), off + kChunk);
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    Seq x = make_batch(windows, idx);
    forward(x, false);
    out.block(static_cast<Eigen::Index>(off), 0, penultimate_cache_.rows(), cfg_.dense_units) =
        penultimate_cache_;
  }
  return out;
}

IntentDistribution IntentModel::predict(const WindowMat& window) {
  if (window.rows() != cfg_.steps || window.cols() != cfg_.input_dim) {
    throw std::invalid_argument("IntentModel::predict: shape mismatch");
  }
  std::vector<WindowMat> one = {window};
  Mat probs = predict_batch(one);
  IntentDistribution d;
  d.granularity = cfg_.granularity;
  d.nio_index = nio_class_index(cfg_.granularity);
  d.probs.resize(static_cast<size_t>(probs.cols()));
  double sum = 0.0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    d.probs[static_cast<size_t>(c)] = static_cast<double>(probs(0, c));
    sum += d.probs[static_cast<size_t>(c)];
  }
  for (auto& p : d.probs) p /= sum;
  return d;
}

nn::json IntentModel::to_json() const {
  nn::json j;
  j["type"] = "intent";
  j["backbone"] = backbone_name(cfg_.backbone);
  j["granularity"] = static_cast<int>(cfg_.granularity);
  j["input_dim"] = cfg_.input_dim;
  j["steps"] = cfg_.steps;
  j["lstm_units"] = cfg_.lstm_units;
  j["conv_filters"] = cfg_.conv_filters;
  j["conv_kernel"] = cfg_.conv_kernel;
  j["dense_units"] = cfg_.dense_units;
  j["dropout"] = cfg_.dropout;
  j["tf_blocks"] = cfg_.tf_blocks;
  j["tf_heads"] = cfg_.tf_heads;
  j["tf_dim"] = cfg_.tf_dim;
  j["num_classes_override"] = cfg_.num_classes_override;
  j["seed"] = cfg_.seed;
  std::vector<std::string> class_names;
  if (cfg_.num_classes_override == 0) {
    const int C = class_count(cfg_.granularity);
    for (int c = 0; c < C; ++c) class_names.emplace_back(class_name(cfg_.granularity, c));
  }
  j["class_names"] = class_names;
  auto* self = const_cast<IntentModel*>(this);
  nn::params_to_json(j, "params", self->params());
  return j;
}

std::unique_ptr<IntentModel> IntentModel::from_json(const nn::json& j) {
  if (j.at("type").get<std::string>() != "intent") {
    throw std::runtime_error("IntentModel::from_json: wrong artifact type");
  }
  Config cfg;
  cfg.backbone = backbone_from_name(j.at("backbone").get<std::string>());
  cfg.granularity = static_cast<Granularity>(j.at("granularity").get<int>());
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.steps = j.at("steps").get<int>();
  cfg.lstm_units = j.at("lstm_units").get<int>();
  cfg.conv_filters = j.at("conv_filters").get<int>();
  cfg.conv_kernel = j.at("conv_kernel").get<int>();
  cfg.dense_units = j.at("dense_units").get<int>();
  cfg.dropout = j.at("dropout").get<float>();
  cfg.tf_blocks = j.at("tf_blocks").get<int>();
  cfg.tf_heads = j.at("tf_heads").get<int>();
  cfg.tf_dim = j.at("tf_dim").get<int>();
  cfg.num_classes_override = j.value("num_classes_override", 0);
  cfg.seed = j.at("seed").get<uint64_t>();
  auto model = std::make_unique<IntentModel>(cfg);
  nn::params_from_json(j, "params", model->params());
  return model;
}

}  // namespace ipd

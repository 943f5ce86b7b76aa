#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "core/intent_dist.hpp"
#include "models/autoencoder.hpp"
#include "models/train_config.hpp"
#include "nn/attention.hpp"
#include "nn/layers.hpp"

namespace ipd {

enum class Backbone { LstmCnn = 0, Lstm, Cnn, Transformer };
std::string backbone_name(Backbone b);
Backbone backbone_from_name(const std::string& n);

// Behavioral-intent classifier over the INT+APP window slice. Default
// topology: parallel LSTM(64) and Conv1d(k=3, 64 filters) -> ReLU -> maxpool
// paths, concatenated, then two dropout+dense blocks (128, C), softmax.
class IntentModel {
 public:
  struct Config {
    Backbone backbone = Backbone::LstmCnn;
    Granularity granularity = Granularity::Category;
    int input_dim = 14;
    int steps = 40;
    int lstm_units = 64;
    int conv_filters = 64;
    int conv_kernel = 3;
    int dense_units = 128;
    float dropout = 0.3f;
    int tf_blocks = 2;
    int tf_heads = 4;
    int tf_dim = 64;
    // > 0 replaces the granularity-derived class count (used by the
    // monolithic binary baseline); predict()'s NIO bookkeeping then no
    // longer applies, use predict_batch + argmax instead.
    int num_classes_override = 0;
    uint64_t seed = 1;
  };

  explicit IntentModel(const Config& cfg);

  // Cross-entropy training; labels are class indices at cfg.granularity.
  TrainLog train(const std::vector<WindowMat>& windows, const std::vector<int>& labels,
                 const TrainConfig& tc);

  IntentDistribution predict(const WindowMat& window);
  nn::Mat predict_batch(const std::vector<WindowMat>& windows);      // (N, C) probabilities
  nn::Mat penultimate_batch(const std::vector<WindowMat>& windows);  // (N, dense_units)

  std::vector<nn::Param*> params();
  int num_classes() const {
    return cfg_.num_classes_override > 0 ? cfg_.num_classes_override
                                         : class_count(cfg_.granularity);
  }

  nn::json to_json() const;
  static std::unique_ptr<IntentModel> from_json(const nn::json& j);
  const Config& config() const { return cfg_; }
  const TrainLog& last_log() const { return log_; }

 private:
  nn::Mat forward(const nn::Seq& x, bool train);
  void backward(const nn::Mat& dlogits);

  Config cfg_;
  // LSTM path
  nn::LSTMLayer lstm_;
  // CNN path
  nn::Conv1d conv1_, conv2_;
  nn::MaxPool1d pool1_, pool2_;
  nn::Seq conv1_mask_, conv2_mask_;
  // Transformer path
  nn::SeqDense embed_;
  std::vector<nn::TransformerBlock> blocks_;
  size_t tf_steps_ = 0;
  // Shared classifier head
  nn::Dropout drop1_, drop2_;
  nn::Dense dense1_, dense2_;
  nn::ReLU relu1_;
  nn::Mat penultimate_cache_;
  // Cache of concat layout for backward
  int lstm_dim_ = 0, flat_dim_ = 0, flat_steps_ = 0;
  TrainLog log_;
};

}  // namespace ipd

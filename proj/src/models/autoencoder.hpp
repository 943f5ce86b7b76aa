#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "models/train_config.hpp"
#include "nn/attention.hpp"
#include "nn/layers.hpp"
#include "nn/serialize.hpp"

namespace ipd {

// One training/inference window: steps x features, rows are time steps.
using WindowMat = Eigen::MatrixXf;

// Gather a batch from a window list into step-major form.
nn::Seq make_batch(const std::vector<WindowMat>& windows, const std::vector<int>& idx);

// Multi-head LSTM autoencoder: H parallel encoder LSTMs over the same input,
// concatenated last hidden states form the latent, one LSTM decoder fed the
// repeated latent reconstructs the input.
class MultiHeadAE {
 public:
  struct Config {
    int input_dim = 26;
    int steps = 40;
    int heads = 8;
    int head_hidden = 8;
    int decoder_hidden = 64;  // = heads * head_hidden by default
    uint64_t seed = 1;
  };

  explicit MultiHeadAE(const Config& cfg);

  // MSE training with early stopping on a deterministic validation split
  // (every 10th window). Restores the best-validation weights.
  TrainLog train(const std::vector<WindowMat>& windows, const TrainConfig& tc);

  nn::Seq reconstruct_batch(const nn::Seq& x);               // forward only
  std::pair<WindowMat, double> reconstruct(const WindowMat& window);
  nn::Mat latent_batch(const nn::Seq& x);                    // (B, heads*head_hidden)

  std::vector<nn::Param*> params();
  uint64_t weights_hash() const;

  nn::json to_json() const;
  static std::unique_ptr<MultiHeadAE> from_json(const nn::json& j);

  const Config& config() const { return cfg_; }
  const TrainLog& last_log() const { return log_; }

 private:
  nn::Seq forward(const nn::Seq& x);
  void backward(const nn::Seq& drecon);

  Config cfg_;
  std::vector<nn::LSTMLayer> heads_;
  nn::LSTMLayer decoder_;
  nn::SeqDense out_;
  nn::Mat latent_cache_;
  size_t steps_cache_ = 0;
  TrainLog log_;
};

// Temporal mean of signed residuals: d = (1/T) * sum_t (x_t - xhat_t).
// Throws on shape mismatch.
Eigen::VectorXd difference_vector(const WindowMat& x, const WindowMat& xhat);

}  // namespace ipd

#pragma once

#include <cstdint>
#include <vector>

namespace ipd {

struct TrainConfig {
  int max_epochs = 100;
  int batch_size = 512;
  float lr = 1e-3f;
  int patience = 5;         // early-stopping patience; <= 0 disables
  float min_delta = 1e-4f;  // minimum val-loss improvement that resets patience
  double val_fraction = 0.1;
  uint64_t seed = 0;
  bool verbose = false;
};

struct TrainLog {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;    // per epoch (empty when no val split)
  int epochs = 0;
  bool early_stopped = false;
};

}  // namespace ipd

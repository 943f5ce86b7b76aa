#pragma once

#include <utility>
#include <vector>

#include "core/taxonomy.hpp"

namespace ipd {

// Probability vector over the C intent classes at one granularity.
struct IntentDistribution {
  std::vector<double> probs;
  Granularity granularity = Granularity::Category;
  int nio_index = 0;
};

// k classes by descending probability; ties broken by ascending class index.
// Throws std::invalid_argument when k is outside 1..C.
std::vector<std::pair<int, double>> topk(const IntentDistribution& d, int k);

}  // namespace ipd

#include "core/intent_dist.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ipd {

std::vector<std::pair<int, double>> topk(const IntentDistribution& d, int k) {
  const int C = static_cast<int>(d.probs.size());
  if (k < 1 || k > C) throw std::invalid_argument("topk: k outside 1..C");
  std::vector<int> order(static_cast<size_t>(C));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = d.probs[static_cast<size_t>(a)];
    const double pb = d.probs[static_cast<size_t>(b)];
    if (pa != pb) return pa > pb;
    return a < b;
  });
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.emplace_back(order[static_cast<size_t>(i)], d.probs[static_cast<size_t>(order[static_cast<size_t>(i)])]);
  }
  return out;
}

}  // namespace ipd

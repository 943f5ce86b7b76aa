#include "adapt/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/util.hpp"

namespace ipd {

std::string scheme_name(SelectionScheme s) {
  switch (s) {
    case SelectionScheme::Random: return "random";
    case SelectionScheme::Time: return "time";
    case SelectionScheme::Similarity: return "similarity";
  }
  return "random";
}

SelectionScheme scheme_from_name(const std::string& n) {
  if (n == "random") return SelectionScheme::Random;
  if (n == "time") return SelectionScheme::Time;
  if (n == "similarity") return SelectionScheme::Similarity;
  throw std::invalid_argument("unknown selection scheme: " + n);
}

namespace {

Eigen::VectorXd flat(const WindowMat& w) {
  Eigen::VectorXd v(w.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) v(k++) = static_cast<double>(w(r, c));
  }
  return v;
}

}  // namespace

std::vector<int> select_calibration_windows(const std::vector<WindowMat>& owner_windows,
                                            const std::vector<WindowMat>& negative_pool,
                                            const AdaptationConfig& cfg) {
  if (cfg.n_shots < 1) throw std::invalid_argument("select_calibration_windows: n_shots >= 1");
  const int m = static_cast<int>(owner_windows.size());
  if (m == 0) throw std::invalid_argument("select_calibration_windows: no owner windows");
  std::vector<int> all(static_cast<size_t>(m));
  std::iota(all.begin(), all.end(), 0);
  if (m <= cfg.n_shots) return all;

  std::vector<int> chosen;
  switch (cfg.scheme) {
    case SelectionScheme::Time: {
      chosen.assign(all.begin(), all.begin() + cfg.n_shots);
      break;
    }
    case SelectionScheme::Random: {
      std::mt19937_64 rng(derive_seed(cfg.seed, "adapt.random"));
      std::vector<int> pool = all;
      std::shuffle(pool.begin(), pool.end(), rng);
      chosen.assign(pool.begin(), pool.begin() + cfg.n_shots);
      break;
    }
    case SelectionScheme::Similarity: {
      if (negative_pool.empty()) {
        throw std::invalid_argument("similarity scheme needs a negative pool");
      }
      // Mean cosine similarity of each owner window to the negative pool,
      // on raw flattened windows.
      std::vector<Eigen::VectorXd> negs;
      negs.reserve(negative_pool.size());
      for (const auto& w : negative_pool) {
        Eigen::VectorXd v = flat(w);
        const double n = v.norm();
        negs.push_back(n > 0.0 ? Eigen::VectorXd(v / n) : v);
      }
      std::vector<std::pair<double, int>> ranked;  // similarity desc = hardest first
      ranked.reserve(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd v = flat(owner_windows[static_cast<size_t>(i)]);
        const double nv = v.norm();
        if (nv > 0.0) v /= nv;
        double mean_sim = 0.0;
        for (const auto& u : negs) mean_sim += v.dot(u);
        mean_sim /= static_cast<double>(negs.size());
        ranked.emplace_back(mean_sim, i);
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      const int n = cfg.n_shots;
      const int hard_n = static_cast<int>(std::lround(cfg.hard_frac * n));
      const int mid_n = static_cast<int>(std::lround(cfg.mid_frac * n));
      const int easy_n = n - hard_n - mid_n;  // total forced to n_shots
      for (int i = 0; i < hard_n; ++i) chosen.push_back(ranked[static_cast<size_t>(i)].second);
      const int mid_lo = hard_n;
      const int mid_hi = m - easy_n;  // exclusive
      const int mid_start = mid_lo + std::max(0, (mid_hi - mid_lo - mid_n) / 2);
      for (int i = 0; i < mid_n; ++i) {
        chosen.push_back(ranked[static_cast<size_t>(mid_start + i)].second);
      }
      for (int i = m - easy_n; i < m; ++i) {
        chosen.push_back(ranked[static_cast<size_t>(i)].second);
      }
      break;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<Eigen::VectorXd> difference_vectors(MultiHeadAE& ae,
                                                const std::vector<WindowMat>& windows,
                                                int batch_size) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(windows.size());
  std::vector<int> idx;
  for (size_t off = 0; off < windows.size(); off += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(windows.size(), off + static_cast<size_t>(batch_size));
    idx.clear();
    for (size_t i = off; i < end; ++i) idx.push_back(static_cast<int>(i));
    const nn::Seq x = make_batch(windows, idx);
    const nn::Seq recon = ae.reconstruct_batch(x);
    const size_t T = x.size();
    const auto B = x[0].rows();
    const auto D = x[0].cols();
    for (Eigen::Index b = 0; b < B; ++b) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(D);
      for (size_t t = 0; t < T; ++t) {
        for (Eigen::Index c = 0; c < D; ++c) {
          d(c) += static_cast<double>(x[t](b, c)) - static_cast<double>(recon[t](b, c));
        }
      }
      d /= static_cast<double>(T);
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> select_adaptation_sets(
    const std::vector<WindowMat>& owner_windows, const std::vector<WindowMat>& negative_pool,
    const AdaptationConfig& cfg) {
  if (owner_windows.empty() || negative_pool.empty()) {
    throw std::invalid_argument("select_adaptation_sets: empty owner or negative pool");
  }
  std::vector<int> owner_idx = select_calibration_windows(owner_windows, negative_pool, cfg);

  // Equal count of negatives, sampled uniformly from the pool.
  const size_t want = owner_idx.size();
  std::vector<int> neg_idx(negative_pool.size());
  std::iota(neg_idx.begin(), neg_idx.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, "adapt.negatives"));
  std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
  if (neg_idx.size() > want) neg_idx.resize(want);
  std::sort(neg_idx.begin(), neg_idx.end());
  return {std::move(owner_idx), std::move(neg_idx)};
}

AdaptResult adapt(MultiHeadAE& ae, const std::vector<WindowMat>& owner_windows,
                  const std::vector<WindowMat>& negative_pool, const AdaptationConfig& cfg,
                  const ml::SvmConfig& svm_cfg) {
  AdaptResult res;
  auto [owner_idx, neg_idx] = select_adaptation_sets(owner_windows, negative_pool, cfg);
  res.selected_owner = std::move(owner_idx);
  res.selected_negative = std::move(neg_idx);
  const std::vector<int>& neg_sel = res.selected_negative;

  std::vector<WindowMat> own, neg;
  own.reserve(res.selected_owner.size());
  for (int i : res.selected_owner) own.push_back(owner_windows[static_cast<size_t>(i)]);
  neg.reserve(neg_sel.size());
  for (int i : neg_sel) neg.push_back(negative_pool[static_cast<size_t>(i)]);

  const std::vector<Eigen::VectorXd> own_dvs = difference_vectors(ae, own);
  const std::vector<Eigen::VectorXd> neg_dvs = difference_vectors(ae, neg);
  res.head.fit(own_dvs, neg_dvs, svm_cfg);
  return res;
}

}  // namespace ipd

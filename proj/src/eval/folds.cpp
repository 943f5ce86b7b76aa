#include "eval/folds.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "core/util.hpp"

namespace ipd {

std::vector<FoldSpec> make_folds(const CorpusManifest& manifest, double snippet_seconds) {
  if (manifest.pairs.empty()) {
    throw std::invalid_argument("make_folds: manifest designates no evaluation pairs");
  }
  constexpr int kFinetuneUsers = 3;
  if (manifest.users.size() < kFinetuneUsers + 3) {
    throw std::invalid_argument("make_folds: too few users for pretrain/finetune/test roles");
  }
  std::vector<FoldSpec> folds;
  folds.reserve(manifest.pairs.size());
  for (size_t i = 0; i < manifest.pairs.size(); ++i) {
    const PairSpec& pair = manifest.pairs[i];
    FoldSpec f;
    f.fold_id = static_cast<int>(i) + 1;
    f.victim = pair.victim;
    f.abuser = pair.abuser;
    f.pair_type = pair.pair_type;
    f.snippet_seconds = snippet_seconds;

    std::vector<std::string> others;
    for (const auto& u : manifest.users) {
      if (u != pair.victim && u != pair.abuser) others.push_back(u);
    }
    if (others.size() < kFinetuneUsers + 1) {
      throw std::invalid_argument("make_folds: not enough non-pair users");
    }
    std::mt19937_64 rng(
        derive_seed(manifest.seed, "fold.finetune", static_cast<uint64_t>(f.fold_id)));
    std::shuffle(others.begin(), others.end(), rng);
    f.finetune_users.assign(others.begin(), others.begin() + kFinetuneUsers);
    f.pretrain_users.assign(others.begin() + kFinetuneUsers, others.end());
    std::sort(f.finetune_users.begin(), f.finetune_users.end());
    std::sort(f.pretrain_users.begin(), f.pretrain_users.end());
    folds.push_back(std::move(f));
  }
  return folds;
}

}  // namespace ipd

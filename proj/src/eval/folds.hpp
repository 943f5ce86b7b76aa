#pragma once

#include <string>
#include <vector>

#include "gen/corpus.hpp"

namespace ipd {

// One leave-two-out split: the victim/abuser pair is held out, three other
// users provide fine-tuning and calibration data, everyone else pretrains
// the shared models. The victim's opening snippet (sessions starting before
// snippet_seconds) joins the fine-tune side as owner calibration data.
struct FoldSpec {
  int fold_id = 0;  // 1-based
  std::string victim;
  std::string abuser;
  std::string pair_type;  // "genuine" | "synthetic"
  std::vector<std::string> pretrain_users;
  std::vector<std::string> finetune_users;
  double snippet_seconds = 300.0;
};

// One fold per manifest pair, deterministic given the manifest seed.
// Throws std::invalid_argument when the manifest has no pairs or too few
// users to fill pretrain + finetune + pair roles.
std::vector<FoldSpec> make_folds(const CorpusManifest& manifest,
                                 double snippet_seconds = 300.0);

}  // namespace ipd

#pragma once

#include <string>
#include <vector>

#include "eval/pipeline.hpp"
#include "nn/serialize.hpp"

namespace ipd {

nn::json metrics_to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nn::json& j);

nn::json fold_result_to_json(const FoldResult& r, bool include_decisions = true);
FoldResult fold_result_from_json(const nn::json& j);

// Results cache layout: <dir>/fold_<id>_<confighash>.json
std::string fold_result_path(const std::string& dir, int fold_id, uint64_t config_hash);
void save_fold_result(const FoldResult& r, const std::string& path,
                      bool include_decisions = true);
FoldResult load_fold_result(const std::string& path);
bool fold_result_exists(const std::string& path);

// Human-readable summary tables over a set of fold results.
std::string detection_table(const std::vector<FoldResult>& folds);  // methods x metrics
std::string topk_table(const std::vector<FoldResult>& folds);       // k sweep
std::string identity_table(const std::vector<FoldResult>& folds);   // by pair type

}  // namespace ipd

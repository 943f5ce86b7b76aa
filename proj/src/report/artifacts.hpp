#pragma once

#include <memory>
#include <string>
#include <vector>

#include "eval/pipeline.hpp"

namespace ipd {

// Names of Granularity levels for flags and serialized configs.
std::string granularity_name(Granularity g);
Granularity granularity_from_name(const std::string& n);

nn::json pipeline_config_to_json(const PipelineConfig& cfg);
// Missing keys keep their defaults, so partial config files work.
PipelineConfig pipeline_config_from_json(const nn::json& j);

// Everything the detection runner needs, written as one directory of JSON
// files by the staged pretrain -> adapt -> calibrate CLI flow.
struct ArtifactBundle {
  NormalizationParams norm;
  std::unique_ptr<MultiHeadAE> ae;
  std::unique_ptr<IntentModel> intent;
  IdentityHead head;  // fitted() == false until `adapt` ran
  PipelineConfig cfg;
  bool calibrated = false;  // cfg.fusion.threshold is meaningful

  // Provenance recorded in run_config.json.
  std::vector<std::string> pretrain_users;
  std::string victim;
  std::vector<std::string> pool_user_ids;
};

inline constexpr const char* kNormalizerFile = "normalizer.json";
inline constexpr const char* kAeFile = "model_ae.json";
inline constexpr const char* kIntentFile = "model_intent.json";
inline constexpr const char* kHeadFile = "identity_head.json";
inline constexpr const char* kRunConfigFile = "run_config.json";

nn::json normalizer_to_json(const NormalizationParams& p);
NormalizationParams normalizer_from_json(const nn::json& j);

// Writes whatever the bundle holds (head only once fitted) plus
// run_config.json; creates dir if needed. Byte-identical across reruns.
void save_artifacts(const std::string& dir, const ArtifactBundle& b);

// Loads a bundle; every file that the requested stage needs must exist or a
// std::runtime_error naming the missing path is thrown. need_head also
// demands identity_head.json; need_threshold demands a calibrated T.
ArtifactBundle load_artifacts(const std::string& dir, bool need_head = true,
                              bool need_threshold = true);

}  // namespace ipd

#include "report/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "adapt/adapt.hpp"
#include "core/util.hpp"

namespace ipd {

namespace fs = std::filesystem;

std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::Category: return "category";
    case Granularity::Action: return "action";
    case Granularity::Subaction: return "subaction";
  }
  throw std::invalid_argument("granularity_name: bad enum value");
}

Granularity granularity_from_name(const std::string& n) {
  if (n == "category") return Granularity::Category;
  if (n == "action") return Granularity::Action;
  if (n == "subaction") return Granularity::Subaction;
  throw std::invalid_argument("unknown granularity: " + n +
                              " (expected category|action|subaction)");
}

nn::json pipeline_config_to_json(const PipelineConfig& cfg) {
  nn::json j;
  j["granularity"] = granularity_name(cfg.granularity);
  j["backbone"] = backbone_name(cfg.backbone);
  j["ae"] = {{"heads", cfg.ae_heads},
             {"head_hidden", cfg.ae_head_hidden},
             {"decoder_hidden", cfg.ae_decoder_hidden},
             {"max_epochs", cfg.ae_max_epochs},
             {"patience", cfg.ae_patience},
             {"subsample", cfg.ae_subsample}};
  j["intent"] = {{"epochs", cfg.intent_epochs}, {"subsample", cfg.intent_subsample}};
  j["train"] = {{"batch_size", cfg.batch_size}, {"lr", cfg.lr}};
  j["adaptation"] = {{"n_shots", cfg.adapt.n_shots},
                     {"scheme", scheme_name(cfg.adapt.scheme)},
                     {"hard_frac", cfg.adapt.hard_frac},
                     {"mid_frac", cfg.adapt.mid_frac},
                     {"easy_frac", cfg.adapt.easy_frac},
                     {"pool_users", cfg.adapt.pool_users},
                     {"seed", cfg.adapt.seed}};
  j["tcm"] = {{"w_stat", cfg.tcm.w_stat},
              {"w_vote", cfg.tcm.w_vote},
              {"w_avg", cfg.tcm.w_avg},
              {"seed", cfg.tcm.seed},
              {"enabled", cfg.use_tcm}};
  j["fusion"] = {{"k", cfg.fusion.k},
                 {"epsilon", cfg.fusion.epsilon},
                 {"threshold", cfg.fusion.threshold},
                 {"grid_lo", cfg.fusion.grid_lo},
                 {"grid_step", cfg.fusion.grid_step},
                 {"grid_points", cfg.fusion.grid_points}};
  j["svm"] = {{"C", cfg.svm.C},
              {"gamma", cfg.svm.gamma},
              {"tol", cfg.svm.tol},
              {"max_passes", cfg.svm.max_passes},
              {"max_iterations", cfg.svm.max_iterations},
              {"seed", cfg.svm.seed}};
  j["val_fraction"] = cfg.val_fraction;
  j["identity_dims"] = cfg.identity_dims;
  j["intent_dims"] = cfg.intent_dims;
  j["seed"] = cfg.seed;
  return j;
}

namespace {

template <typename T>
void get_if(const nn::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nn::json& j) {
  PipelineConfig cfg;
  if (j.contains("granularity")) {
    cfg.granularity = granularity_from_name(j.at("granularity").get<std::string>());
  }
  if (j.contains("backbone")) {
    cfg.backbone = backbone_from_name(j.at("backbone").get<std::string>());
  }
  if (j.contains("ae")) {
    const nn::json& a = j.at("ae");
    get_if(a, "heads", cfg.ae_heads);
    get_if(a, "head_hidden", cfg.ae_head_hidden);
    get_if(a, "decoder_hidden", cfg.ae_decoder_hidden);
    get_if(a, "max_epochs", cfg.ae_max_epochs);
    get_if(a, "patience", cfg.ae_patience);
    get_if(a, "subsample", cfg.ae_subsample);
  }
  if (j.contains("intent")) {
    const nn::json& a = j.at("intent");
    get_if(a, "epochs", cfg.intent_epochs);
    get_if(a, "subsample", cfg.intent_subsample);
  }
  if (j.contains("train")) {
    const nn::json& a = j.at("train");
    get_if(a, "batch_size", cfg.batch_size);
    get_if(a, "lr", cfg.lr);
  }
  if (j.contains("adaptation")) {
    const nn::json& a = j.at("adaptation");
    get_if(a, "n_shots", cfg.adapt.n_shots);
    if (a.contains("scheme")) cfg.adapt.scheme = scheme_from_name(a.at("scheme").get<std::string>());
    get_if(a, "hard_frac", cfg.adapt.hard_frac);
    get_if(a, "mid_frac", cfg.adapt.mid_frac);
    get_if(a, "easy_frac", cfg.adapt.easy_frac);
    get_if(a, "pool_users", cfg.adapt.pool_users);
    get_if(a, "seed", cfg.adapt.seed);
  }
  if (j.contains("tcm")) {
    const nn::json& a = j.at("tcm");
    get_if(a, "w_stat", cfg.tcm.w_stat);
    get_if(a, "w_vote", cfg.tcm.w_vote);
    get_if(a, "w_avg", cfg.tcm.w_avg);
    get_if(a, "seed", cfg.tcm.seed);
    get_if(a, "enabled", cfg.use_tcm);
  }
  if (j.contains("fusion")) {
    const nn::json& a = j.at("fusion");
    get_if(a, "k", cfg.fusion.k);
    get_if(a, "epsilon", cfg.fusion.epsilon);
    get_if(a, "threshold", cfg.fusion.threshold);
    get_if(a, "grid_lo", cfg.fusion.grid_lo);
    get_if(a, "grid_step", cfg.fusion.grid_step);
    get_if(a, "grid_points", cfg.fusion.grid_points);
  }
  if (j.contains("svm")) {
    const nn::json& a = j.at("svm");
    get_if(a, "C", cfg.svm.C);
    get_if(a, "gamma", cfg.svm.gamma);
    get_if(a, "tol", cfg.svm.tol);
    get_if(a, "max_passes", cfg.svm.max_passes);
    get_if(a, "max_iterations", cfg.svm.max_iterations);
    get_if(a, "seed", cfg.svm.seed);
  }
  get_if(j, "val_fraction", cfg.val_fraction);
  get_if(j, "identity_dims", cfg.identity_dims);
  get_if(j, "intent_dims", cfg.intent_dims);
  get_if(j, "seed", cfg.seed);
  return cfg;
}

nn::json normalizer_to_json(const NormalizationParams& p) {
  nn::json lo = nn::json::array(), hi = nn::json::array();
  for (const auto& mm : p.min_max) {
    lo.push_back(mm.first);
    hi.push_back(mm.second);
  }
  return nn::json{{"type", "minmax_normalizer"}, {"dim", kFeatureDim}, {"min", lo}, {"max", hi}};
}

NormalizationParams normalizer_from_json(const nn::json& j) {
  if (j.value("dim", 0) != kFeatureDim) {
    throw std::runtime_error("normalizer dim mismatch");
  }
  NormalizationParams p;
  const nn::json& lo = j.at("min");
  const nn::json& hi = j.at("max");
  for (int i = 0; i < kFeatureDim; ++i) {
    p.min_max[static_cast<size_t>(i)] = {lo.at(static_cast<size_t>(i)).get<float>(),
                                         hi.at(static_cast<size_t>(i)).get<float>()};
  }
  return p;
}

namespace {

void write_json(const std::string& path, const nn::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

nn::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return nn::json::parse(in);
}

std::string require_file(const std::string& dir, const char* file) {
  const std::string path = dir + "/" + file;
  if (!fs::exists(path)) {
    throw std::runtime_error("missing model artifact: " + path);
  }
  return path;
}

}  // namespace

void save_artifacts(const std::string& dir, const ArtifactBundle& b) {
  fs::create_directories(dir);
  write_json(dir + "/" + kNormalizerFile, normalizer_to_json(b.norm));
  if (b.ae) write_json(dir + "/" + kAeFile, b.ae->to_json());
  if (b.intent) write_json(dir + "/" + kIntentFile, b.intent->to_json());
  if (b.head.fitted()) write_json(dir + "/" + kHeadFile, b.head.to_json());

  nn::json run = pipeline_config_to_json(b.cfg);
  run["format_version"] = 1;
  run["fusion"]["calibrated"] = b.calibrated;
  nn::json prov;
  prov["pretrain_users"] = b.pretrain_users;
  prov["victim"] = b.victim;
  prov["pool_user_ids"] = b.pool_user_ids;
  prov["ae_hash"] = b.ae ? hex64(b.ae->weights_hash()) : "";
  prov["config_hash"] = hex64(b.cfg.config_hash());
  run["provenance"] = prov;
  write_json(dir + "/" + kRunConfigFile, run);
}

ArtifactBundle load_artifacts(const std::string& dir, bool need_head, bool need_threshold) {
  if (!fs::exists(dir)) {
    throw std::runtime_error("missing model artifact directory: " + dir);
  }
  ArtifactBundle b;
  const std::string run_path = require_file(dir, kRunConfigFile);
  const nn::json run = read_json(run_path);
  b.cfg = pipeline_config_from_json(run);
  b.calibrated = run.contains("fusion") && run.at("fusion").value("calibrated", false);
  if (run.contains("provenance")) {
    const nn::json& prov = run.at("provenance");
    get_if(prov, "pretrain_users", b.pretrain_users);
    get_if(prov, "victim", b.victim);
    get_if(prov, "pool_user_ids", b.pool_user_ids);
  }

  b.norm = normalizer_from_json(read_json(require_file(dir, kNormalizerFile)));
  b.ae = MultiHeadAE::from_json(read_json(require_file(dir, kAeFile)));
  b.intent = IntentModel::from_json(read_json(require_file(dir, kIntentFile)));

  const std::string head_path = dir + "/" + kHeadFile;
  if (fs::exists(head_path)) {
    b.head = IdentityHead::from_json(read_json(head_path));
  } else if (need_head) {
    throw std::runtime_error("missing model artifact: " + head_path +
                             " (run `ipd adapt` first)");
  }
  if (need_threshold && !b.calibrated) {
    throw std::runtime_error("threshold not calibrated in " + run_path +
                             " (run `ipd calibrate` first)");
  }
  return b;
}

}  // namespace ipd

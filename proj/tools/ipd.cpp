// ipd: command-line surface for the intimate-partner-infiltration detector.
// Subcommands: generate-data, pretrain, adapt, calibrate, detect, evaluate,
// ablate, report-summary. Exit codes: 0 success, 1 runtime failure, 2 usage.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "core/util.hpp"
#include "eval/ablations.hpp"
#include "eval/results.hpp"
#include "gen/corpus.hpp"
#include "report/report.hpp"

namespace fs = std::filesystem;
using namespace ipd;

namespace {

// ---------------------------------------------------------------- helpers

// Pipeline knobs shared by pretrain/calibrate/evaluate/ablate. A --config
// JSON file (same schema as run_config.json) supplies the base; explicit
// flags override it.
struct ModelFlags {
  std::string config_path;
  std::string granularity = "category";
  std::string backbone = "lstm_cnn";
  std::string scheme = "random";
  uint64_t seed = 1;
  int ae_epochs = 0, intent_epochs = 0;
  int ae_subsample = 0, intent_subsample = 0;
  int batch_size = 0, n_shots = 0, k = 0, heads = 0;
  double lr = 0.0, val_fraction = 0.0;
  bool no_tcm = false;
  int verbose = 0;

  CLI::Option *o_gran = nullptr, *o_bb = nullptr, *o_scheme = nullptr, *o_seed = nullptr,
              *o_aee = nullptr, *o_ine = nullptr, *o_aes = nullptr, *o_ins = nullptr,
              *o_bs = nullptr, *o_ns = nullptr, *o_k = nullptr, *o_heads = nullptr,
              *o_lr = nullptr, *o_vf = nullptr;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (run_config.json schema)")
        ->check(CLI::ExistingFile);
    o_gran = cmd->add_option("--granularity", granularity, "category|action|subaction");
    o_bb = cmd->add_option("--backbone", backbone, "lstm_cnn|lstm|cnn|transformer");
    o_scheme = cmd->add_option("--scheme", scheme, "few-shot selection: random|time|similarity");
    o_seed = cmd->add_option("--seed", seed, "base RNG seed threaded through every stage");
    o_aee = cmd->add_option("--ae-epochs", ae_epochs, "autoencoder max epochs");
    o_ine = cmd->add_option("--intent-epochs", intent_epochs, "intent-model epochs");
    o_aes = cmd->add_option("--ae-subsample", ae_subsample, "cap on AE pretrain windows (0=all)");
    o_ins = cmd->add_option("--intent-subsample", intent_subsample,
                            "cap on intent pretrain windows (0=all)");
    o_bs = cmd->add_option("--batch-size", batch_size, "minibatch size");
    o_ns = cmd->add_option("--n-shots", n_shots, "few-shot owner windows");
    o_k = cmd->add_option("--k", k, "fusion top-k operating point");
    o_heads = cmd->add_option("--ae-heads", heads, "autoencoder LSTM head count");
    o_lr = cmd->add_option("--lr", lr, "learning rate");
    o_vf = cmd->add_option("--val-fraction", val_fraction, "calibration slice fraction");
    cmd->add_flag("--no-tcm", no_tcm, "disable the temporal consistency module");
    cmd->add_flag("-v,--verbose", verbose, "progress logging to stderr");
  }

  PipelineConfig build() const {
    PipelineConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read config: " + config_path);
      cfg = pipeline_config_from_json(nn::json::parse(in));
    }
    if (o_gran->count()) cfg.granularity = granularity_from_name(granularity);
    if (o_bb->count()) cfg.backbone = backbone_from_name(backbone);
    if (o_scheme->count()) cfg.adapt.scheme = scheme_from_name(scheme);
    if (o_seed->count()) cfg.seed = seed;
    if (o_aee->count()) cfg.ae_max_epochs = ae_epochs;
    if (o_ine->count()) cfg.intent_epochs = intent_epochs;
    if (o_aes->count()) cfg.ae_subsample = ae_subsample;
    if (o_ins->count()) cfg.intent_subsample = intent_subsample;
    if (o_bs->count()) cfg.batch_size = batch_size;
    if (o_ns->count()) cfg.adapt.n_shots = n_shots;
    if (o_k->count()) cfg.fusion.k = k;
    if (o_heads->count()) cfg.ae_heads = heads;
    if (o_lr->count()) cfg.lr = static_cast<float>(lr);
    if (o_vf->count()) cfg.val_fraction = val_fraction;
    if (no_tcm) cfg.use_tcm = false;
    cfg.verbose = verbose;
    return cfg;
  }
};

// Every-Nth split of one user's time-ordered windows: the val slice feeds
// threshold calibration, the rest the adaptation negative pool. Must match
// across `adapt` and `calibrate` runs, hence derived only from val_fraction.
void split_pool_user(const std::vector<WindowRecord>& recs, double val_fraction,
                     std::vector<const WindowRecord*>* pool,
                     std::vector<const WindowRecord*>* val) {
  const int every =
      std::max(2, static_cast<int>(std::lround(1.0 / std::max(0.01, val_fraction))));
  for (size_t i = 0; i < recs.size(); ++i) {
    if (static_cast<int>(i % static_cast<size_t>(every)) == every - 1) {
      if (val) val->push_back(&recs[i]);
    } else if (pool) {
      pool->push_back(&recs[i]);
    }
  }
}

std::vector<std::string> default_pool_users(const CorpusManifest& manifest,
                                            const ArtifactBundle& bundle,
                                            const std::string& victim, int want) {
  if (!bundle.pool_user_ids.empty()) return bundle.pool_user_ids;
  const std::set<std::string> pretrained(bundle.pretrain_users.begin(),
                                         bundle.pretrain_users.end());
  std::vector<std::string> pool;
  for (const std::string& u : manifest.users) {
    if (u == victim || pretrained.count(u)) continue;
    pool.push_back(u);
    if (static_cast<int>(pool.size()) == want) break;
  }
  if (pool.empty()) {
    throw std::runtime_error(
        "no negative-pool users available: every user is either the victim or "
        "in the pretrain set; pass --pool explicitly");
  }
  return pool;
}

void check_users_exist(const CorpusManifest& manifest, const std::vector<std::string>& users) {
  const std::set<std::string> known(manifest.users.begin(), manifest.users.end());
  for (const std::string& u : users) {
    if (!known.count(u)) throw std::runtime_error("unknown user id: " + u);
  }
}

std::string write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  return path;
}

// --------------------------------------------------------------- commands

struct GenerateArgs {
  int users = 27;
  double minutes = 41.5;
  uint64_t seed = 1;
  double sigma_sig = 1.0, noise = 1.0, rate = 20.0;
  int genuine_pairs = 6, synthetic_pairs = 6;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  CorpusConfig c;
  c.n_users = a.users;
  c.minutes_per_user = a.minutes;
  c.seed = a.seed;
  c.sigma_sig = a.sigma_sig;
  c.noise_level = a.noise;
  c.rate_hz = a.rate;
  c.n_genuine_pairs = a.genuine_pairs;
  c.n_synthetic_pairs = a.synthetic_pairs;
  c.out_dir = a.out;
  c.validate();
  const CorpusManifest m = generate_corpus(c);
  std::printf("corpus: %s\n  users %zu, sessions %zu, pairs %zu, sigma_sig %.2f, seed %llu\n",
              m.dir.c_str(), m.users.size(), m.sessions.size(), m.pairs.size(), m.sigma_sig,
              static_cast<unsigned long long>(m.seed));
  return 0;
}

struct PretrainArgs {
  std::string corpus, out;
  std::vector<std::string> exclude;
  ModelFlags flags;
};

int cmd_pretrain(const PretrainArgs& a) {
  const CorpusManifest manifest = load_manifest(a.corpus);
  check_users_exist(manifest, a.exclude);
  const std::set<std::string> skip(a.exclude.begin(), a.exclude.end());
  std::vector<std::string> users;
  for (const std::string& u : manifest.users) {
    if (!skip.count(u)) users.push_back(u);
  }
  if (users.empty()) throw std::runtime_error("pretrain: every user excluded");

  const PipelineConfig cfg = a.flags.build();
  WindowStore store(manifest);
  TrainedModels models = pretrain_models(store, users, cfg);

  ArtifactBundle bundle;
  bundle.norm = models.norm;
  bundle.ae = std::move(models.ae);
  bundle.intent = std::move(models.intent);
  bundle.cfg = cfg;
  bundle.pretrain_users = users;
  save_artifacts(a.out, bundle);
  std::printf("pretrained on %zu users -> %s\n  ae epochs %d (hash %s), intent epochs %d\n",
              users.size(), a.out.c_str(), models.ae_log.epochs,
              hex64(bundle.ae->weights_hash()).c_str(), models.intent_log.epochs);
  return 0;
}

struct AdaptArgs {
  std::string corpus, models, victim;
  std::vector<std::string> pool;
  double snippet_seconds = 300.0;
  ModelFlags flags;
};

int cmd_adapt(const AdaptArgs& a) {
  const CorpusManifest manifest = load_manifest(a.corpus);
  ArtifactBundle bundle = load_artifacts(a.models, /*need_head=*/false, /*need_threshold=*/false);
  check_users_exist(manifest, {a.victim});
  check_users_exist(manifest, a.pool);

  PipelineConfig cfg = bundle.cfg;
  if (a.flags.o_scheme->count()) cfg.adapt.scheme = scheme_from_name(a.flags.scheme);
  if (a.flags.o_ns->count()) cfg.adapt.n_shots = a.flags.n_shots;
  if (a.flags.o_seed->count()) cfg.seed = a.flags.seed;
  cfg.adapt.seed = derive_seed(cfg.seed, "adapt.cli");

  std::vector<std::string> pool = a.pool.empty()
                                      ? default_pool_users(manifest, bundle, a.victim,
                                                           cfg.adapt.pool_users)
                                      : a.pool;

  WindowStore store(manifest);
  std::vector<const WindowRecord*> snippet;
  for (const WindowRecord& r : store.user(a.victim)) {
    if (r.session_t0 < a.snippet_seconds) snippet.push_back(&r);
  }
  if (snippet.empty()) {
    throw std::runtime_error("adapt: no victim windows inside the first " +
                             std::to_string(a.snippet_seconds) + " s calibration snippet");
  }
  std::vector<const WindowRecord*> pool_recs;
  for (const std::string& u : pool) {
    split_pool_user(store.user(u), cfg.val_fraction, &pool_recs, nullptr);
  }
  if (pool_recs.empty()) throw std::runtime_error("adapt: empty negative pool");

  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;
  const std::vector<WindowMat> owner = prepare_windows(snippet, bundle.norm, id_dims);
  const std::vector<WindowMat> negatives = prepare_windows(pool_recs, bundle.norm, id_dims);

  const uint64_t ae_before = bundle.ae->weights_hash();
  AdaptResult res = adapt(*bundle.ae, owner, negatives, cfg.adapt, cfg.svm);
  if (bundle.ae->weights_hash() != ae_before) {
    throw std::runtime_error("adapt: autoencoder weights changed; expected frozen AE");
  }

  bundle.head = res.head;
  bundle.cfg = cfg;
  bundle.victim = a.victim;
  bundle.pool_user_ids = pool;
  bundle.calibrated = false;  // new head invalidates any previous threshold
  save_artifacts(a.models, bundle);
  std::printf("adapted head for %s (%s, %zu owner + %zu negative windows) -> %s\n",
              a.victim.c_str(), scheme_name(cfg.adapt.scheme).c_str(), res.selected_owner.size(),
              res.selected_negative.size(), a.models.c_str());
  return 0;
}

struct CalibrateArgs {
  std::string corpus, models;
  std::vector<std::string> pool;
  ModelFlags flags;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const CorpusManifest manifest = load_manifest(a.corpus);
  ArtifactBundle bundle = load_artifacts(a.models, /*need_head=*/true, /*need_threshold=*/false);
  check_users_exist(manifest, a.pool);

  PipelineConfig& cfg = bundle.cfg;
  if (a.flags.o_k->count()) cfg.fusion.k = a.flags.k;
  const std::vector<std::string> pool =
      a.pool.empty() ? default_pool_users(manifest, bundle, bundle.victim, cfg.adapt.pool_users)
                     : a.pool;

  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;
  const std::vector<int> in_dims =
      cfg.intent_dims.empty() ? intent_default_dims() : cfg.intent_dims;

  WindowStore store(manifest);
  std::vector<double> scores, scores_all;
  std::vector<int> labels, labels_all;
  for (const std::string& u : pool) {
    std::vector<const WindowRecord*> val;
    split_pool_user(store.user(u), cfg.val_fraction, nullptr, &val);
    if (val.empty()) continue;
    const std::vector<WindowMat> vid = prepare_windows(val, bundle.norm, id_dims);
    const std::vector<WindowMat> vin = prepare_windows(val, bundle.norm, in_dims);
    const StreamEval ev =
        eval_stream(*bundle.ae, bundle.head, *bundle.intent, vid, vin, cfg.tcm, cfg.use_tcm);
    for (size_t i = 0; i < val.size(); ++i) {
      const double s = fusion_score(ev.smoothed[i], cfg.fusion.k, cfg.fusion.epsilon);
      const int y = val[i]->subaction == Subaction::Nio ? 0 : 1;
      scores_all.push_back(s);
      labels_all.push_back(y);
      if (ev.u_hat[i] == 1) {
        scores.push_back(s);
        labels.push_back(y);
      }
    }
  }
  const bool filtered_ok = std::count(labels.begin(), labels.end(), 1) > 0 &&
                           std::count(labels.begin(), labels.end(), 0) > 0;
  const double T = calibrate_threshold(filtered_ok ? scores : scores_all,
                                       filtered_ok ? labels : labels_all, cfg.fusion);
  cfg.fusion.threshold = T;
  bundle.calibrated = true;
  save_artifacts(a.models, bundle);
  std::printf("calibrated T = %.4f at k = %d on %zu validation windows -> %s\n", T, cfg.fusion.k,
              filtered_ok ? scores.size() : scores_all.size(), a.models.c_str());
  return 0;
}

struct DetectArgs {
  std::string trace, models, out;
  int top_k = 3;
  double rate = kDefaultRateHz, span = kDefaultSpanS, stride = kDefaultStrideS;
};

int cmd_detect(const DetectArgs& a) {
  DetectionConfig d;
  d.trace_path = a.trace;
  d.models_dir = a.models;
  d.out_path = a.out;
  d.top_k = a.top_k;
  d.windows = WindowOptions{a.rate, a.span, a.stride};
  const ForensicReport r = run_detection(d);
  int owner = 0;
  for (const ReportEntry& e : r.entries) {
    if (std::holds_alternative<OwnerEntry>(e)) ++owner;
  }
  std::printf("report: %s\n  %zu entries (%d owner, %zu non-owner), %d flagged, T=%.4f, k=%d\n",
              a.out.c_str(), r.entries.size(), owner, r.entries.size() - owner,
              r.flagged_count(), r.header.threshold, r.header.fusion_k);
  return 0;
}

struct EvaluateArgs {
  std::string corpus, out;
  std::string folds = "all";
  std::string baselines = "all";
  bool embedding = false;
  bool no_cache = false;
  bool no_decisions = false;
  ModelFlags flags;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const CorpusManifest manifest = load_manifest(a.corpus);
  const PipelineConfig cfg = a.flags.build();
  std::vector<FoldSpec> folds = make_folds(manifest);
  if (a.folds != "all") {
    std::set<int> keep;
    for (const auto& tok : CLI::detail::split(a.folds, ',')) keep.insert(std::stoi(tok));
    std::erase_if(folds, [&](const FoldSpec& f) { return !keep.count(f.fold_id); });
    if (folds.empty()) throw std::runtime_error("--folds matched no fold ids");
  }

  FoldRunRequest req;
  req.embedding = a.embedding;
  req.keep_decisions = !a.no_decisions;
  if (a.baselines == "all") {
    req.baselines = kBaselineNames;
  } else if (a.baselines != "none") {
    for (const auto& tok : CLI::detail::split(a.baselines, ',')) {
      if (std::find(kBaselineNames.begin(), kBaselineNames.end(), tok) == kBaselineNames.end()) {
        throw std::runtime_error("unknown baseline: " + tok);
      }
      req.baselines.push_back(tok);
    }
  }

  fs::create_directories(a.out);
  WindowStore store(manifest);
  std::vector<FoldResult> results;
  for (const FoldSpec& f : folds) {
    const std::string path = fold_result_path(a.out, f.fold_id, cfg.config_hash());
    if (!a.no_cache && fold_result_exists(path)) {
      if (cfg.verbose) std::fprintf(stderr, "[fold %02d] cached: %s\n", f.fold_id, path.c_str());
      results.push_back(load_fold_result(path));
      continue;
    }
    FoldResult r = run_fold(store, f, cfg, req);
    save_fold_result(r, path, req.keep_decisions);
    if (cfg.verbose) std::fprintf(stderr, "[fold %02d] saved: %s\n", f.fold_id, path.c_str());
    results.push_back(std::move(r));
    store.clear();  // windows are cheap to recompute; keep memory flat
  }

  std::string summary = detection_table(results);
  summary += "\n" + topk_table(results);
  summary += "\n" + identity_table(results);
  write_text(a.out + "/summary.txt", summary);
  std::fputs(summary.c_str(), stdout);
  std::printf("\n%zu fold results in %s\n", results.size(), a.out.c_str());
  return 0;
}

struct AblateArgs {
  std::string corpus, kind, out;
  std::string folds = "all";
  ModelFlags flags;
};

int cmd_ablate(const AblateArgs& a) {
  if (std::find(kAblationKinds.begin(), kAblationKinds.end(), a.kind) == kAblationKinds.end()) {
    std::string kinds;
    for (const auto& k : kAblationKinds) kinds += (kinds.empty() ? "" : "|") + k;
    throw std::runtime_error("unknown ablation kind: " + a.kind + " (expected " + kinds + ")");
  }
  const CorpusManifest manifest = load_manifest(a.corpus);
  AblationOptions opt;
  opt.base = a.flags.build();
  if (a.folds != "all") {
    for (const auto& tok : CLI::detail::split(a.folds, ',')) {
      opt.fold_ids.push_back(std::stoi(tok));
    }
  }
  const std::vector<AblationTable> tables = run_ablation(a.kind, manifest, opt);
  fs::create_directories(a.out);
  for (const AblationTable& t : tables) {
    const std::string text = t.to_text();
    write_text(a.out + "/" + t.kind + ".txt", text);
    write_text(a.out + "/" + t.kind + ".json", t.to_json().dump(1) + "\n");
    std::fputs(text.c_str(), stdout);
    std::fputs("\n", stdout);
  }
  std::printf("%zu ablation tables in %s\n", tables.size(), a.out.c_str());
  return 0;
}

struct SummaryArgs {
  std::string results, report, out;
};

int cmd_report_summary(const SummaryArgs& a) {
  if (a.results.empty() && a.report.empty()) {
    throw std::runtime_error("report-summary: pass --results and/or --report");
  }
  std::string text;
  if (!a.results.empty()) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(a.results)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("fold_", 0) == 0 && e.path().extension() == ".json") {
        files.push_back(e.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no fold_*.json results under " + a.results);
    std::vector<FoldResult> results;
    for (const std::string& f : files) results.push_back(load_fold_result(f));
    text += detection_table(results) + "\n" + topk_table(results) + "\n" +
            identity_table(results);
    char line[128];
    std::snprintf(line, sizeof(line), "\n%zu fold results loaded from %s\n", results.size(),
                  a.results.c_str());
    text += line;
  }
  if (!a.report.empty()) {
    const ForensicReport r = ForensicReport::load(a.report);
    int owner = 0;
    double t_lo = 0.0, t_hi = 0.0;
    std::map<std::string, int> flagged_apps;
    for (const ReportEntry& e : r.entries) {
      if (std::holds_alternative<OwnerEntry>(e)) {
        ++owner;
      } else {
        const NonOwnerEntry& n = std::get<NonOwnerEntry>(e);
        if (n.risk) ++flagged_apps[n.app];
      }
    }
    if (!r.entries.empty()) {
      t_lo = std::holds_alternative<OwnerEntry>(r.entries.front())
                 ? std::get<OwnerEntry>(r.entries.front()).t_start
                 : std::get<NonOwnerEntry>(r.entries.front()).t_start;
      const ReportEntry& last = r.entries.back();
      t_hi = std::holds_alternative<OwnerEntry>(last) ? std::get<OwnerEntry>(last).t_end
                                                      : std::get<NonOwnerEntry>(last).t_end;
    }
    char line[256];
    std::snprintf(line, sizeof(line),
                  "forensic report %s\n  format v%d, T=%.4f, k=%d, top-%d intents, %s\n"
                  "  %zu entries (%d owner, %zu non-owner), %d flagged, span %.1f..%.1f s\n",
                  a.report.c_str(), r.header.format_version, r.header.threshold,
                  r.header.fusion_k, r.header.top_k, r.header.granularity.c_str(),
                  r.entries.size(), owner, r.entries.size() - static_cast<size_t>(owner),
                  r.flagged_count(), t_lo, t_hi);
    text += line;
    for (const auto& [app, cnt] : flagged_apps) {
      std::snprintf(line, sizeof(line), "  flagged in %s: %d windows\n", app.c_str(), cnt);
      text += line;
    }
  }
  if (!a.out.empty()) {
    write_text(a.out, text);
    std::printf("summary written to %s\n", a.out.c_str());
  } else {
    std::fputs(text.c_str(), stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipd: intimate-partner-infiltration detector over smartphone usage traces"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand("generate-data", "Generate the synthetic labeled corpus");
  c_gen->add_option("--users", gen.users, "number of users")->capture_default_str();
  c_gen->add_option("--minutes", gen.minutes, "trace minutes per user")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "corpus RNG seed")->capture_default_str();
  c_gen->add_option("--sigma-sig", gen.sigma_sig, "between-user signature spread")
      ->capture_default_str();
  c_gen->add_option("--noise", gen.noise, "within-user noise level")->capture_default_str();
  c_gen->add_option("--rate", gen.rate, "native sampling rate Hz")->capture_default_str();
  c_gen->add_option("--genuine-pairs", gen.genuine_pairs, "partner victim/abuser pairs")
      ->capture_default_str();
  c_gen->add_option("--synthetic-pairs", gen.synthetic_pairs, "stranger victim/abuser pairs")
      ->capture_default_str();
  c_gen->add_option("--out", gen.out, "corpus output directory")->required();

  PretrainArgs pre;
  CLI::App* c_pre = app.add_subcommand("pretrain", "Train the shared AE + intent models");
  c_pre->add_option("--corpus", pre.corpus, "corpus directory")->required();
  c_pre->add_option("--out", pre.out, "model artifact directory")->required();
  c_pre->add_option("--exclude", pre.exclude, "user ids to hold out")->delimiter(',');
  pre.flags.add_to(c_pre);

  AdaptArgs ada;
  CLI::App* c_ada = app.add_subcommand("adapt", "Few-shot owner adaptation of the identity head");
  c_ada->add_option("--corpus", ada.corpus, "corpus directory")->required();
  c_ada->add_option("--models", ada.models, "model artifact directory")->required();
  c_ada->add_option("--victim", ada.victim, "owner user id")->required();
  c_ada->add_option("--pool", ada.pool, "negative-pool user ids")->delimiter(',');
  c_ada->add_option("--snippet-seconds", ada.snippet_seconds,
                    "owner calibration snippet cut-off")
      ->capture_default_str();
  ada.flags.add_to(c_ada);

  CalibrateArgs cal;
  CLI::App* c_cal = app.add_subcommand("calibrate", "Grid-search the fusion threshold T");
  c_cal->add_option("--corpus", cal.corpus, "corpus directory")->required();
  c_cal->add_option("--models", cal.models, "model artifact directory")->required();
  c_cal->add_option("--pool", cal.pool, "validation user ids")->delimiter(',');
  cal.flags.add_to(c_cal);

  DetectArgs det;
  CLI::App* c_det = app.add_subcommand("detect", "Batch detection over one logged trace");
  c_det->add_option("--trace", det.trace, "session JSONL file")->required();
  c_det->add_option("--models", det.models, "model artifact directory")->required();
  c_det->add_option("--out", det.out, "forensic report path")->required();
  c_det->add_option("--top-k", det.top_k, "intents listed per non-owner entry")
      ->capture_default_str();
  c_det->add_option("--rate", det.rate, "window resample rate Hz")->capture_default_str();
  c_det->add_option("--span", det.span, "window span seconds")->capture_default_str();
  c_det->add_option("--stride", det.stride, "window stride seconds")->capture_default_str();

  EvaluateArgs eva;
  CLI::App* c_eva = app.add_subcommand("evaluate", "Leave-two-out evaluation across folds");
  c_eva->add_option("--corpus", eva.corpus, "corpus directory")->required();
  c_eva->add_option("--out", eva.out, "results directory")->required();
  c_eva->add_option("--folds", eva.folds, "all | comma-separated fold ids")
      ->capture_default_str();
  c_eva->add_option("--baselines", eva.baselines, "all | none | comma-separated names")
      ->capture_default_str();
  c_eva->add_flag("--embedding", eva.embedding, "attach embedding-distance stats");
  c_eva->add_flag("--no-cache", eva.no_cache, "rerun folds even when cached");
  c_eva->add_flag("--no-decisions", eva.no_decisions, "omit per-window decisions from results");
  eva.flags.add_to(c_eva);

  AblateArgs abl;
  CLI::App* c_abl = app.add_subcommand("ablate", "Run one named ablation study");
  c_abl->add_option("--corpus", abl.corpus, "corpus directory")->required();
  c_abl->add_option("--kind", abl.kind,
                    "modality|app_held_out|rate_window|head_count|id_classifier_head")
      ->required();
  c_abl->add_option("--out", abl.out, "tables output directory")->required();
  c_abl->add_option("--folds", abl.folds, "all | comma-separated fold ids")
      ->capture_default_str();
  abl.flags.add_to(c_abl);

  SummaryArgs sum;
  CLI::App* c_sum = app.add_subcommand("report-summary", "Summarize results or a forensic report");
  c_sum->add_option("--results", sum.results, "fold results directory");
  c_sum->add_option("--report", sum.report, "forensic report file");
  c_sum->add_option("--out", sum.out, "write summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage diagnostic
    return 2;
  }

  try {
    if (c_gen->parsed()) return cmd_generate(gen);
    if (c_pre->parsed()) return cmd_pretrain(pre);
    if (c_ada->parsed()) return cmd_adapt(ada);
    if (c_cal->parsed()) return cmd_calibrate(cal);
    if (c_det->parsed()) return cmd_detect(det);
    if (c_eva->parsed()) return cmd_evaluate(eva);
    if (c_abl->parsed()) return cmd_ablate(abl);
    if (c_sum->parsed()) return cmd_report_summary(sum);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}

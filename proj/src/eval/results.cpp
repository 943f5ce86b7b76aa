#include "eval/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "core/util.hpp"

namespace ipd {

nn::json metrics_to_json(const MetricsReport& m) {
  nn::json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["tn"] = m.tn;
  j["f1"] = m.f1;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["fpr"] = m.fpr;
  j["fnr"] = m.fnr;
  j["accuracy"] = m.accuracy;
  j["precision_defined"] = m.precision_defined;
  j["recall_defined"] = m.recall_defined;
  j["fpr_defined"] = m.fpr_defined;
  j["f1_defined"] = m.f1_defined;
  return j;
}

MetricsReport metrics_from_json(const nn::json& j) {
  MetricsReport m;
  m.tp = j.at("tp").get<long>();
  m.fp = j.at("fp").get<long>();
  m.fn = j.at("fn").get<long>();
  m.tn = j.at("tn").get<long>();
  m.f1 = j.at("f1").get<double>();
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.fpr = j.at("fpr").get<double>();
  m.fnr = j.at("fnr").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  m.precision_defined = j.at("precision_defined").get<bool>();
  m.recall_defined = j.at("recall_defined").get<bool>();
  m.fpr_defined = j.at("fpr_defined").get<bool>();
  m.f1_defined = j.at("f1_defined").get<bool>();
  return m;
}

nn::json fold_result_to_json(const FoldResult& r, bool include_decisions) {
  nn::json j;
  j["format_version"] = 1;
  j["fold_id"] = r.fold_id;
  j["victim"] = r.victim;
  j["abuser"] = r.abuser;
  j["pair_type"] = r.pair_type;
  j["config_hash"] = hex64(r.config_hash);
  j["threshold"] = r.threshold;
  j["metrics"] = metrics_to_json(r.metrics);
  j["identity"] = metrics_to_json(r.identity);
  nn::json ks = nn::json::array();
  for (const KResult& k : r.k_sweep) {
    nn::json kj;
    kj["k"] = k.k;
    kj["threshold"] = k.threshold;
    kj["metrics"] = metrics_to_json(k.metrics);
    ks.push_back(kj);
  }
  j["k_sweep"] = ks;
  j["topk_accuracy"] = r.topk_accuracy;
  j["intent_top1_raw"] = r.intent_top1_raw;
  j["ae_hash"] = hex64(r.ae_hash);
  nn::json bj;
  for (const auto& [name, m] : r.baselines) bj[name] = metrics_to_json(m);
  j["baselines"] = bj;
  j["embedding"] = nn::json{{"computed", r.embed_computed},
                            {"euclidean", r.embed_euclidean},
                            {"cosine", r.embed_cosine}};
  j["ae_train_loss"] = r.ae_log.train_loss;
  j["ae_val_loss"] = r.ae_log.val_loss;
  j["intent_train_loss"] = r.intent_log.train_loss;
  if (include_decisions) {
    nn::json ds = nn::json::array();
    for (const DecisionRecord& d : r.decisions) {
      nn::json dj;
      dj["user_id"] = d.user_id;
      dj["session_id"] = d.session_id;
      dj["t_start"] = d.t_start;
      dj["app"] = std::string(name(d.platform));
      dj["y_true"] = d.y_true;
      dj["u_hat"] = d.u_hat;
      dj["identity_score"] = d.identity_score;
      dj["fusion_score"] = d.fusion_score;
      dj["y_hat"] = d.y_hat;
      nn::json ti = nn::json::array();
      for (const auto& [cls, p] : d.top_intents) ti.push_back(nn::json{{"class", cls}, {"p", p}});
      dj["top_intents"] = ti;
      ds.push_back(dj);
    }
    j["decisions"] = ds;
  }
  return j;
}

FoldResult fold_result_from_json(const nn::json& j) {
  FoldResult r;
  r.fold_id = j.at("fold_id").get<int>();
  r.victim = j.at("victim").get<std::string>();
  r.abuser = j.at("abuser").get<std::string>();
  r.pair_type = j.at("pair_type").get<std::string>();
  r.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
  r.threshold = j.at("threshold").get<double>();
  r.metrics = metrics_from_json(j.at("metrics"));
  r.identity = metrics_from_json(j.at("identity"));
  for (const auto& kj : j.at("k_sweep")) {
    KResult k;
    k.k = kj.at("k").get<int>();
    k.threshold = kj.at("threshold").get<double>();
    k.metrics = metrics_from_json(kj.at("metrics"));
    r.k_sweep.push_back(k);
  }
  r.topk_accuracy = j.at("topk_accuracy").get<std::vector<double>>();
  r.intent_top1_raw = j.at("intent_top1_raw").get<double>();
  r.ae_hash = std::stoull(j.at("ae_hash").get<std::string>(), nullptr, 16);
  for (const auto& [name, mj] : j.at("baselines").items()) {
    r.baselines[name] = metrics_from_json(mj);
  }
  const auto& ej = j.at("embedding");
  r.embed_computed = ej.at("computed").get<bool>();
  r.embed_euclidean = ej.at("euclidean").get<double>();
  r.embed_cosine = ej.at("cosine").get<double>();
  r.ae_log.train_loss = j.at("ae_train_loss").get<std::vector<double>>();
  r.ae_log.val_loss = j.at("ae_val_loss").get<std::vector<double>>();
  r.intent_log.train_loss = j.at("intent_train_loss").get<std::vector<double>>();
  if (j.contains("decisions")) {
    for (const auto& dj : j.at("decisions")) {
      DecisionRecord d;
      d.user_id = dj.at("user_id").get<std::string>();
      d.session_id = dj.at("session_id").get<std::string>();
      d.t_start = dj.at("t_start").get<double>();
      d.platform = app_from_name(dj.at("app").get<std::string>());
      d.y_true = dj.at("y_true").get<int>();
      d.u_hat = dj.at("u_hat").get<int>();
      d.identity_score = dj.at("identity_score").get<double>();
      d.fusion_score = dj.at("fusion_score").get<double>();
      d.y_hat = dj.at("y_hat").get<int>();
      for (const auto& ti : dj.at("top_intents")) {
        d.top_intents.emplace_back(ti.at("class").get<int>(), ti.at("p").get<double>());
      }
      r.decisions.push_back(std::move(d));
    }
  }
  return r;
}

std::string fold_result_path(const std::string& dir, int fold_id, uint64_t config_hash) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "fold_%02d_%s.json", fold_id, hex64(config_hash).c_str());
  return dir + "/" + buf;
}

void save_fold_result(const FoldResult& r, const std::string& path, bool include_decisions) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_fold_result: cannot write " + path);
  out << fold_result_to_json(r, include_decisions).dump(1) << "\n";
}

FoldResult load_fold_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_fold_result: cannot read " + path);
  nn::json j;
  in >> j;
  return fold_result_from_json(j);
}

bool fold_result_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

namespace {

std::string fmt_pm(const Aggregate& a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f+-%.3f", a.mean, a.stddev);
  return buf;
}

}  // namespace

std::string detection_table(const std::vector<FoldResult>& folds) {
  if (folds.empty()) return "(no fold results)\n";
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %-14s %-14s %-14s %-14s %-14s %-14s\n", "method",
                "F1", "precision", "recall", "FPR", "FNR", "accuracy");
  out += line;

  auto row = [&](const std::string& name, auto metric_of) {
    std::vector<double> f1, pr, rc, fpr, fnr, acc;
    for (const auto& f : folds) {
      const MetricsReport* m = metric_of(f);
      if (!m) continue;
      f1.push_back(m->f1);
      pr.push_back(m->precision);
      rc.push_back(m->recall);
      fpr.push_back(m->fpr);
      fnr.push_back(m->fnr);
      acc.push_back(m->accuracy);
    }
    if (f1.empty()) return;
    std::snprintf(line, sizeof(line), "%-14s %-14s %-14s %-14s %-14s %-14s %-14s\n",
                  name.c_str(), fmt_pm(aggregate(f1)).c_str(), fmt_pm(aggregate(pr)).c_str(),
                  fmt_pm(aggregate(rc)).c_str(), fmt_pm(aggregate(fpr)).c_str(),
                  fmt_pm(aggregate(fnr)).c_str(), fmt_pm(aggregate(acc)).c_str());
    out += line;
  };

  row("pipeline", [](const FoldResult& f) { return &f.metrics; });
  for (const std::string& b : kBaselineNames) {
    row(b, [&b](const FoldResult& f) -> const MetricsReport* {
      auto it = f.baselines.find(b);
      return it == f.baselines.end() ? nullptr : &it->second;
    });
  }
  return out;
}

std::string topk_table(const std::vector<FoldResult>& folds) {
  if (folds.empty()) return "(no fold results)\n";
  std::map<int, std::vector<const KResult*>> by_k;
  for (const auto& f : folds) {
    for (const auto& k : f.k_sweep) by_k[k.k].push_back(&k);
  }
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-6s %-14s %-14s %-14s %-14s\n", "k", "F1", "FPR",
                "threshold", "topk_acc");
  out += line;
  for (const auto& [k, rs] : by_k) {
    std::vector<double> f1, fpr, thr, acc;
    for (const KResult* r : rs) {
      f1.push_back(r->metrics.f1);
      fpr.push_back(r->metrics.fpr);
      thr.push_back(r->threshold);
    }
    for (const auto& f : folds) {
      if (k >= 1 && static_cast<size_t>(k) <= f.topk_accuracy.size()) {
        acc.push_back(f.topk_accuracy[static_cast<size_t>(k - 1)]);
      }
    }
    std::snprintf(line, sizeof(line), "%-6d %-14s %-14s %-14s %-14s\n", k,
                  fmt_pm(aggregate(f1)).c_str(), fmt_pm(aggregate(fpr)).c_str(),
                  fmt_pm(aggregate(thr)).c_str(), fmt_pm(aggregate(acc)).c_str());
    out += line;
  }
  return out;
}

std::string identity_table(const std::vector<FoldResult>& folds) {
  if (folds.empty()) return "(no fold results)\n";
  auto block = [&](const std::string& label, auto filter) {
    std::vector<double> f1, fpr;
    for (const auto& f : folds) {
      if (!filter(f)) continue;
      f1.push_back(f.identity.f1);
      fpr.push_back(f.identity.fpr);
    }
    char line[256];
    if (f1.empty()) return std::string();
    std::snprintf(line, sizeof(line), "%-12s %-14s %-14s\n", label.c_str(),
                  fmt_pm(aggregate(f1)).c_str(), fmt_pm(aggregate(fpr)).c_str());
    return std::string(line);
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %-14s %-14s\n", "pair_type", "identity_F1",
                "identity_FPR");
  out += line;
  out += block("genuine", [](const FoldResult& f) { return f.pair_type == "genuine"; });
  out += block("synthetic", [](const FoldResult& f) { return f.pair_type == "synthetic"; });
  out += block("overall", [](const FoldResult&) { return true; });
  return out;
}

}  // namespace ipd

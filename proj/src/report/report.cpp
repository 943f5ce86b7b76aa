#include "report/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "core/trace_io.hpp"
#include "core/util.hpp"

namespace ipd {

namespace {

nn::json entry_to_json(const ReportEntry& e) {
  if (std::holds_alternative<OwnerEntry>(e)) {
    const OwnerEntry& o = std::get<OwnerEntry>(e);
    return nn::json{{"start", o.t_start}, {"end", o.t_end}, {"verdict", "owner"}};
  }
  const NonOwnerEntry& n = std::get<NonOwnerEntry>(e);
  nn::json j{{"start", n.t_start},
             {"end", n.t_end},
             {"verdict", "non_owner"},
             {"risk", n.risk},
             {"app", n.app},
             {"fusion_score", n.fusion_score}};
  nn::json ti = nn::json::array();
  for (const auto& [name, p] : n.top_intents) {
    ti.push_back(nn::json{{"intent", name}, {"p", p}});
  }
  j["top_intents"] = ti;
  return j;
}

ReportEntry entry_from_json(const nn::json& j) {
  const std::string verdict = j.at("verdict").get<std::string>();
  if (verdict == "owner") {
    return OwnerEntry{j.at("start").get<double>(), j.at("end").get<double>()};
  }
  NonOwnerEntry n;
  n.t_start = j.at("start").get<double>();
  n.t_end = j.at("end").get<double>();
  n.risk = j.at("risk").get<bool>();
  n.app = j.at("app").get<std::string>();
  n.fusion_score = j.at("fusion_score").get<double>();
  for (const nn::json& ti : j.at("top_intents")) {
    n.top_intents.emplace_back(ti.at("intent").get<std::string>(), ti.at("p").get<double>());
  }
  return n;
}

nn::json header_to_json(const ReportHeader& h) {
  return nn::json{{"format_version", h.format_version},
                  {"ae_hash", h.ae_hash},
                  {"config_hash", h.config_hash},
                  {"threshold", h.threshold},
                  {"fusion_k", h.fusion_k},
                  {"top_k", h.top_k},
                  {"granularity", h.granularity},
                  {"security_note", h.security_note}};
}

ReportHeader header_from_json(const nn::json& j) {
  ReportHeader h;
  h.format_version = j.at("format_version").get<int>();
  h.ae_hash = j.at("ae_hash").get<std::string>();
  h.config_hash = j.at("config_hash").get<std::string>();
  h.threshold = j.at("threshold").get<double>();
  h.fusion_k = j.at("fusion_k").get<int>();
  h.top_k = j.at("top_k").get<int>();
  h.granularity = j.at("granularity").get<std::string>();
  h.security_note = j.at("security_note").get<std::string>();
  return h;
}

double entry_start(const ReportEntry& e) {
  return std::holds_alternative<OwnerEntry>(e) ? std::get<OwnerEntry>(e).t_start
                                               : std::get<NonOwnerEntry>(e).t_start;
}

// Majority app over the raw window's one-hot block; all-zero rows (the
// "Other" encoding) fall back to App::Other.
App window_app(const WindowMat& raw) {
  Eigen::Index best = -1;
  float best_sum = 0.0f;
  for (int a = 0; a < kAppOneHotSlots; ++a) {
    const float s = raw.col(kAppOneHotBegin + a).sum();
    if (s > best_sum) {
      best_sum = s;
      best = a;
    }
  }
  if (best < 0 || best_sum * 2.0f < static_cast<float>(raw.rows())) return App::Other;
  return static_cast<App>(best);
}

std::vector<WindowRecord> window_trace_file(const std::string& path, const WindowOptions& opt) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing trace file: " + path);
  }
  const SessionTrace trace = read_session_jsonl(path);
  const SessionTrace grid = resample_zoh(trace, opt.rate_hz);
  const std::vector<Window> wins = make_windows(grid, opt.span_s, opt.stride_s, opt.rate_hz);
  std::vector<WindowRecord> out;
  out.reserve(wins.size());
  for (const Window& w : wins) {
    WindowRecord r;
    r.features.resize(static_cast<Eigen::Index>(w.rows.size()), kFeatureDim);
    for (size_t i = 0; i < w.rows.size(); ++i) {
      for (int c = 0; c < kFeatureDim; ++c) {
        r.features(static_cast<Eigen::Index>(i), c) = w.rows[i][static_cast<size_t>(c)];
      }
    }
    r.user_id = trace.user_id;
    r.session_id = trace.session_id;
    r.subaction = trace.subaction;
    r.platform = trace.platform;
    r.session_t0 = grid.samples.front().t;
    r.t_start = w.t_start;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

int ForensicReport::flagged_count() const {
  int n = 0;
  for (const ReportEntry& e : entries) {
    if (std::holds_alternative<NonOwnerEntry>(e) && std::get<NonOwnerEntry>(e).risk) ++n;
  }
  return n;
}

nn::json ForensicReport::to_json() const {
  nn::json j;
  j["header"] = header_to_json(header);
  nn::json es = nn::json::array();
  for (const ReportEntry& e : entries) es.push_back(entry_to_json(e));
  j["entries"] = es;
  return j;
}

void ForensicReport::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << header_to_json(header).dump() << "\n";
  for (const ReportEntry& e : entries) out << entry_to_json(e).dump() << "\n";
}

ForensicReport ForensicReport::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read report: " + path);
  ForensicReport r;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty report: " + path);
  r.header = header_from_json(nn::json::parse(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    r.entries.push_back(entry_from_json(nn::json::parse(line)));
  }
  return r;
}

ForensicReport run_detection(const DetectionConfig& dcfg) {
  ArtifactBundle bundle = load_artifacts(dcfg.models_dir, /*need_head=*/true,
                                         /*need_threshold=*/true);
  const PipelineConfig& cfg = bundle.cfg;

  const std::vector<WindowRecord> records = window_trace_file(dcfg.trace_path, dcfg.windows);
  if (records.empty()) {
    throw std::runtime_error("trace too short to window: " + dcfg.trace_path);
  }

  std::vector<const WindowRecord*> ptrs;
  ptrs.reserve(records.size());
  for (const WindowRecord& r : records) ptrs.push_back(&r);
  const std::vector<int> id_dims =
      cfg.identity_dims.empty() ? identity_default_dims() : cfg.identity_dims;
  const std::vector<int> in_dims =
      cfg.intent_dims.empty() ? intent_default_dims() : cfg.intent_dims;
  const std::vector<WindowMat> idw = prepare_windows(ptrs, bundle.norm, id_dims);
  const std::vector<WindowMat> inw = prepare_windows(ptrs, bundle.norm, in_dims);

  const StreamEval ev =
      eval_stream(*bundle.ae, bundle.head, *bundle.intent, idw, inw, cfg.tcm, cfg.use_tcm);

  ForensicReport report;
  report.header.ae_hash = hex64(bundle.ae->weights_hash());
  report.header.config_hash = hex64(cfg.config_hash());
  report.header.threshold = cfg.fusion.threshold;
  report.header.fusion_k = cfg.fusion.k;
  report.header.top_k = dcfg.top_k;
  report.header.granularity = granularity_name(cfg.granularity);

  const int n_classes = class_count(cfg.granularity);
  for (size_t i = 0; i < records.size(); ++i) {
    const double t0 = records[i].t_start;
    const double t1 = t0 + dcfg.windows.span_s;
    if (ev.u_hat[i] == 0) {
      report.entries.push_back(OwnerEntry{t0, t1});
      continue;
    }
    NonOwnerEntry e;
    e.t_start = t0;
    e.t_end = t1;
    const double s = fusion_score(ev.smoothed[i], cfg.fusion.k, cfg.fusion.epsilon);
    e.fusion_score = s;
    e.risk = decide(1, s, cfg.fusion.threshold) == 1;
    e.app = std::string(name(window_app(records[i].features)));
    const int k = std::min(dcfg.top_k, n_classes);
    for (const auto& [cls, p] : topk(ev.smoothed[i], k)) {
      e.top_intents.emplace_back(std::string(class_name(cfg.granularity, cls)), p);
    }
    report.entries.push_back(std::move(e));
  }

  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ReportEntry& a, const ReportEntry& b) {
                     return entry_start(a) < entry_start(b);
                   });
  for (size_t i = 1; i < report.entries.size(); ++i) {
    if (entry_start(report.entries[i]) <= entry_start(report.entries[i - 1])) {
      throw std::runtime_error("report entries not strictly increasing in start time");
    }
  }

  if (!dcfg.out_path.empty()) report.save(dcfg.out_path);
  return report;
}

}  // namespace ipd

#include "gen/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "core/trace_io.hpp"
#include "core/util.hpp"
#include "gen/session.hpp"
#include "gen/templates.hpp"
#include "nlohmann/json.hpp"

namespace ipd {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {
constexpr double kReferenceMinutes = 41.5;  // protocol budget the templates are sized for

double r4(double v) { return std::round(v * 1e4) / 1e4; }
}  // namespace

void CorpusConfig::validate() const {
  if (n_users < 4) throw std::invalid_argument("corpus: n_users must be >= 4");
  if (minutes_per_user <= 5.0) {
    throw std::invalid_argument("corpus: minutes_per_user must exceed the 5-minute calibration length");
  }
  if (sigma_sig < 0.0) throw std::invalid_argument("corpus: sigma_sig must be >= 0");
  if (rate_hz <= 0.0) throw std::invalid_argument("corpus: rate_hz must be positive");
  if (2 * (n_genuine_pairs + n_synthetic_pairs) > n_users) {
    throw std::invalid_argument("corpus: not enough users for the requested pairs");
  }
  if (out_dir.empty()) throw std::invalid_argument("corpus: out_dir required");
}

std::string corpus_user_id(int user_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%02d", user_index % 100);
  return buf;
}

UserProfile corpus_profile(uint64_t corpus_seed, double sigma_sig, int user_index) {
  const uint64_t seed = derive_seed(corpus_seed, "profile", static_cast<uint64_t>(user_index));
  return generate_profile(seed, sigma_sig, corpus_user_id(user_index));
}

std::vector<const SessionMeta*> CorpusManifest::sessions_of(const std::string& user_id) const {
  std::vector<const SessionMeta*> out;
  for (const auto& s : sessions) {
    if (s.user_id == user_id) out.push_back(&s);
  }
  return out;
}

CorpusManifest generate_corpus(const CorpusConfig& config) {
  config.validate();
  fs::create_directories(fs::path(config.out_dir) / "traces");

  CorpusManifest m;
  m.seed = config.seed;
  m.sigma_sig = config.sigma_sig;
  m.noise_level = config.noise_level;
  m.rate_hz = config.rate_hz;
  m.minutes_per_user = config.minutes_per_user;
  m.dir = config.out_dir;

  const double dur_scale = std::max(0.02, config.minutes_per_user / kReferenceMinutes);
  const double budget_s = config.minutes_per_user * 60.0;

  for (int ui = 0; ui < config.n_users; ++ui) {
    const std::string uid = corpus_user_id(ui);
    m.users.push_back(uid);
    const UserProfile profile = corpus_profile(config.seed, config.sigma_sig, ui);

    std::mt19937_64 sched_rng(derive_seed(config.seed, "sched", static_cast<uint64_t>(ui)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Shuffled pass over all 44 templates, then NIO filler to the budget.
    std::vector<int> order(kNumTasks);
    for (int i = 0; i < kNumTasks; ++i) order[static_cast<size_t>(i)] = i + 1;
    std::shuffle(order.begin(), order.end(), sched_rng);

    std::vector<double> durs(order.size());
    double total = 0.0;
    for (size_t i = 0; i < order.size(); ++i) {
      const TaskTemplate& t = task_template(order[i]);
      durs[i] = (t.dur_lo_s + u01(sched_rng) * (t.dur_hi_s - t.dur_lo_s)) * dur_scale;
      total += durs[i];
    }
    if (total > 0.98 * budget_s) {
      const double squeeze = 0.98 * budget_s / total;
      for (auto& d : durs) d *= squeeze;
    }

    std::array<int, kNumTasks + 1> occurrence{};
    double t_cursor = 0.0;
    double used = 0.0;
    int sess_idx = 0;

    auto emit = [&](int task_id, double dur) {
      const TaskTemplate& tmpl = task_template(task_id);
      char sid[16];
      std::snprintf(sid, sizeof(sid), "s%03d", sess_idx);
      SessionGenOptions opts;
      opts.rate_hz = config.rate_hz;
      opts.t0 = t_cursor;
      opts.dur_scale = dur_scale;
      opts.noise_level = config.noise_level;
      opts.session_id = uid + "-" + sid;

      const uint64_t sseed = derive_seed(
          config.seed, uid + "/task" + std::to_string(task_id),
          static_cast<uint64_t>(occurrence[static_cast<size_t>(task_id)]));
      occurrence[static_cast<size_t>(task_id)]++;

      SessionTrace trace = generate_session(profile, tmpl, dur, sseed, opts);
      const std::string rel = "traces/" + uid + "_" + sid + ".jsonl";
      write_session_jsonl(trace, (fs::path(config.out_dir) / rel).string());

      SessionMeta meta;
      meta.user_id = uid;
      meta.session_id = opts.session_id;
      meta.file = rel;
      meta.task_id = task_id;
      meta.subaction = tmpl.subaction;
      meta.platform = tmpl.platform;
      meta.t0 = t_cursor;
      meta.duration_s = trace.duration_s();
      m.sessions.push_back(meta);

      t_cursor += trace.duration_s() + 2.0 + 4.0 * u01(sched_rng);
      used += trace.duration_s();
      ++sess_idx;
    };

    for (size_t i = 0; i < order.size(); ++i) emit(order[i], durs[i]);

    // NIO filler until the minute budget is exhausted.
    while (budget_s - used >= std::max(3.0, 8.0 * dur_scale)) {
      const int task_id = kFirstNioTask + static_cast<int>(sched_rng() % 7);
      const TaskTemplate& t = task_template(task_id);
      double dur = (t.dur_lo_s + u01(sched_rng) * (t.dur_hi_s - t.dur_lo_s)) * dur_scale;
      dur = std::min(dur, budget_s - used);
      if (dur < 0.4 * t.dur_lo_s * dur_scale) break;
      emit(task_id, dur);
    }
  }

  // Victim/abuser designations: genuine pairs first, then synthetic pairings.
  for (int i = 0; i < config.n_genuine_pairs; ++i) {
    m.pairs.push_back({corpus_user_id(2 * i), corpus_user_id(2 * i + 1), "genuine"});
  }
  const int base = 2 * config.n_genuine_pairs;
  for (int i = 0; i < config.n_synthetic_pairs; ++i) {
    m.pairs.push_back(
        {corpus_user_id(base + 2 * i), corpus_user_id(base + 2 * i + 1), "synthetic"});
  }

  save_manifest(m, config.out_dir);
  return m;
}

void save_manifest(const CorpusManifest& m, const std::string& dir) {
  ordered_json j;
  j["format_version"] = 1;
  j["seed"] = m.seed;
  j["sigma_sig"] = r4(m.sigma_sig);
  j["noise_level"] = r4(m.noise_level);
  j["rate_hz"] = r4(m.rate_hz);
  j["minutes_per_user"] = r4(m.minutes_per_user);
  j["users"] = m.users;
  j["pairs"] = ordered_json::array();
  for (const auto& p : m.pairs) {
    j["pairs"].push_back({{"victim", p.victim}, {"abuser", p.abuser}, {"pair_type", p.pair_type}});
  }
  j["sessions"] = ordered_json::array();
  for (const auto& s : m.sessions) {
    j["sessions"].push_back({{"user_id", s.user_id},
                             {"session_id", s.session_id},
                             {"file", s.file},
                             {"task_id", s.task_id},
                             {"subaction", std::string(name(s.subaction))},
                             {"platform", std::string(name(s.platform))},
                             {"t0", r4(s.t0)},
                             {"duration_s", r4(s.duration_s)}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("save_manifest: cannot write under " + dir);
  out << j.dump(2) << '\n';
}

CorpusManifest load_manifest(const std::string& dir) {
  const auto path = fs::path(dir) / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_manifest: cannot open " + path.string());
  ordered_json j = ordered_json::parse(in);
  CorpusManifest m;
  m.seed = j.at("seed").get<uint64_t>();
  m.sigma_sig = j.at("sigma_sig").get<double>();
  m.noise_level = j.at("noise_level").get<double>();
  m.rate_hz = j.at("rate_hz").get<double>();
  m.minutes_per_user = j.at("minutes_per_user").get<double>();
  m.users = j.at("users").get<std::vector<std::string>>();
  for (const auto& p : j.at("pairs")) {
    m.pairs.push_back({p.at("victim").get<std::string>(), p.at("abuser").get<std::string>(),
                       p.at("pair_type").get<std::string>()});
  }
  for (const auto& s : j.at("sessions")) {
    SessionMeta meta;
    meta.user_id = s.at("user_id").get<std::string>();
    meta.session_id = s.at("session_id").get<std::string>();
    meta.file = s.at("file").get<std::string>();
    meta.task_id = s.at("task_id").get<int>();
    meta.subaction = subaction_from_name(s.at("subaction").get<std::string>());
    meta.platform = app_from_name(s.at("platform").get<std::string>());
    meta.t0 = s.at("t0").get<double>();
    meta.duration_s = s.at("duration_s").get<double>();
    m.sessions.push_back(meta);
  }
  m.dir = dir;
  return m;
}

}  // namespace ipd

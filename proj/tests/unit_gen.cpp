#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/taxonomy.hpp"
#include "core/trace_io.hpp"
#include "gen/corpus.hpp"
#include "gen/templates.hpp"

using namespace ipd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CorpusConfig small_config(const std::string& dir, uint64_t seed = 7, double sigma = 1.0) {
  CorpusConfig cfg;
  cfg.n_users = 4;
  cfg.seed = seed;
  cfg.sigma_sig = sigma;
  cfg.minutes_per_user = 6.0;
  cfg.n_genuine_pairs = 1;
  cfg.n_synthetic_pairs = 1;
  cfg.out_dir = dir;
  return cfg;
}

}  // namespace

TEST_CASE("CorpusConfig::validate rejects bad configurations") {
  CorpusConfig cfg = small_config("gen_data/none");
  CHECK_NOTHROW(cfg.validate());
  CorpusConfig c1 = cfg;
  c1.n_users = 3;
  CHECK_THROWS(c1.validate());
  CorpusConfig c2 = cfg;
  c2.minutes_per_user = 5.0;
  CHECK_THROWS(c2.validate());
  CorpusConfig c3 = cfg;
  c3.sigma_sig = -0.1;
  CHECK_THROWS(c3.validate());
  CorpusConfig c4 = cfg;
  c4.n_genuine_pairs = 2;  // 2*(2+1) > 4 users
  CHECK_THROWS(c4.validate());
  CorpusConfig c5 = cfg;
  c5.out_dir.clear();
  CHECK_THROWS(c5.validate());
  CorpusConfig c6 = cfg;
  c6.rate_hz = 0.0;
  CHECK_THROWS(c6.validate());
}

TEST_CASE("generate_corpus: identical configs give byte-identical directories") {
  const CorpusManifest a = generate_corpus(small_config("gen_data/det_a"));
  const CorpusManifest b = generate_corpus(small_config("gen_data/det_b"));
  REQUIRE(a.sessions.size() == b.sessions.size());

  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator("gen_data/det_a")) {
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), "gen_data/det_a"));
  }
  REQUIRE(rel.size() == a.sessions.size() + 1);  // traces + manifest.json
  for (const auto& r : rel) {
    INFO("file ", r.string());
    CHECK(slurp(fs::path("gen_data/det_a") / r) == slurp(fs::path("gen_data/det_b") / r));
  }

  // A different seed changes the trace contents.
  const CorpusManifest c = generate_corpus(small_config("gen_data/det_c", 8));
  REQUIRE(!c.sessions.empty());
  bool any_diff = false;
  for (const auto& s : a.sessions) {
    const fs::path other = fs::path("gen_data/det_c") / s.file;
    if (!fs::exists(other) || slurp(fs::path("gen_data/det_a") / s.file) != slurp(other)) {
      any_diff = true;
      break;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("manifest: load returns what generate saved") {
  const std::string dir = "gen_data/mani";
  const CorpusManifest m = generate_corpus(small_config(dir, 11));
  const CorpusManifest r = load_manifest(dir);
  CHECK(r.seed == m.seed);
  CHECK(r.sigma_sig == m.sigma_sig);
  CHECK(r.noise_level == m.noise_level);
  CHECK(r.rate_hz == m.rate_hz);
  CHECK(r.minutes_per_user == m.minutes_per_user);
  CHECK(r.users == m.users);
  CHECK(r.dir == dir);
  REQUIRE(r.sessions.size() == m.sessions.size());
  for (size_t i = 0; i < m.sessions.size(); ++i) {
    CHECK(r.sessions[i].user_id == m.sessions[i].user_id);
    CHECK(r.sessions[i].session_id == m.sessions[i].session_id);
    CHECK(r.sessions[i].file == m.sessions[i].file);
    CHECK(r.sessions[i].task_id == m.sessions[i].task_id);
    CHECK(r.sessions[i].subaction == m.sessions[i].subaction);
    CHECK(r.sessions[i].platform == m.sessions[i].platform);
    CHECK(std::abs(r.sessions[i].t0 - m.sessions[i].t0) < 1e-4);
    CHECK(std::abs(r.sessions[i].duration_s - m.sessions[i].duration_s) < 1e-4);
  }
  REQUIRE(r.pairs.size() == m.pairs.size());
  for (size_t i = 0; i < m.pairs.size(); ++i) {
    CHECK(r.pairs[i].victim == m.pairs[i].victim);
    CHECK(r.pairs[i].abuser == m.pairs[i].abuser);
    CHECK(r.pairs[i].pair_type == m.pairs[i].pair_type);
  }
  CHECK_THROWS(load_manifest("gen_data/does_not_exist"));
}

TEST_CASE("corpus sessions: protocol coverage, ordering and metadata consistency") {
  const std::string dir = "gen_data/props";
  const CorpusManifest m = generate_corpus(small_config(dir, 13));

  CHECK(m.users == std::vector<std::string>{"u00", "u01", "u02", "u03"});
  REQUIRE(m.pairs.size() == 2);
  CHECK(m.pairs[0].victim == "u00");
  CHECK(m.pairs[0].abuser == "u01");
  CHECK(m.pairs[0].pair_type == "genuine");
  CHECK(m.pairs[1].victim == "u02");
  CHECK(m.pairs[1].abuser == "u03");
  CHECK(m.pairs[1].pair_type == "synthetic");

  for (const auto& uid : m.users) {
    const auto sessions = m.sessions_of(uid);
    REQUIRE(sessions.size() >= static_cast<size_t>(kNumTasks));
    std::set<int> seen_tasks;
    double prev_end = -1.0;
    for (const SessionMeta* s : sessions) {
      CHECK(s->user_id == uid);
      seen_tasks.insert(s->task_id);
      // Time-ordered and non-overlapping.
      CHECK(s->t0 > prev_end);
      prev_end = s->t0 + s->duration_s;
      CHECK(s->duration_s > 0.0);
      // Metadata mirrors the task template.
      const TaskTemplate& tmpl = task_template(s->task_id);
      CHECK(s->subaction == tmpl.subaction);
      CHECK(s->platform == tmpl.platform);
      // Trace file exists, parses, and matches the meta.
      const SessionTrace trace = read_session_jsonl((fs::path(dir) / s->file).string());
      CHECK(trace.user_id == uid);
      CHECK(trace.session_id == s->session_id);
      CHECK(trace.subaction == s->subaction);
      CHECK(std::abs(trace.samples.front().t - s->t0) < 1e-3);
      CHECK(std::abs(trace.duration_s() - s->duration_s) < 1e-3);
      // Samples on a uniform time grid.
      for (size_t i = 1; i < trace.samples.size(); ++i) {
        CHECK(trace.samples[i].t > trace.samples[i - 1].t);
      }
    }
    // Every template appears: the protocol pass covers all 44 tasks, and the
    // filler only adds more NIO sessions on top.
    CHECK(seen_tasks.size() == static_cast<size_t>(kNumTasks));
    // Filler keeps the per-user time on task near the minute budget.
    double used = 0.0;
    for (const SessionMeta* s : sessions) used += s->duration_s;
    CHECK(used > 0.60 * 6.0 * 60.0);
    CHECK(used < 1.05 * 6.0 * 60.0);
  }

  // NIO sessions (tasks 38..44) carry NIO subactions, and only them.
  for (const auto& s : m.sessions) {
    const bool nio_task = s.task_id >= kFirstNioTask;
    CHECK(nio_task == (category_of(action_of(s.subaction)) == Category::Nio));
  }
}

TEST_CASE("profiles: sigma controls inter-user spread, zero collapses it") {
  const UserProfile a0 = corpus_profile(99, 0.0, 0);
  const UserProfile b0 = corpus_profile(99, 0.0, 1);
  CHECK(a0.signature() == b0.signature());  // sigma=0: all users identical

  const UserProfile a2 = corpus_profile(99, 2.0, 0);
  const UserProfile b2 = corpus_profile(99, 2.0, 1);
  REQUIRE(a2.signature().size() == b2.signature().size());
  double dist2 = 0.0;
  for (size_t i = 0; i < a2.signature().size(); ++i) {
    const double d = a2.signature()[i] - b2.signature()[i];
    dist2 += d * d;
  }
  CHECK(dist2 > 1e-3);

  // Spread grows with sigma (perturbations pass through exp/clamp, so the
  // growth is monotone rather than exactly linear).
  auto spread = [](const UserProfile& x, const UserProfile& y) {
    const auto sx = x.signature(), sy = y.signature();
    double d2 = 0.0;
    for (size_t i = 0; i < sx.size(); ++i) d2 += (sx[i] - sy[i]) * (sx[i] - sy[i]);
    return d2;
  };
  const UserProfile a1 = corpus_profile(99, 1.0, 0);
  const UserProfile b1 = corpus_profile(99, 1.0, 1);
  CHECK(spread(a1, b1) > 0.0);
  CHECK(spread(a2, b2) > spread(a1, b1));

  // Deterministic.
  CHECK(corpus_profile(99, 2.0, 0).signature() == a2.signature());
  CHECK(generate_profile(4242, 1.5).signature() == generate_profile(4242, 1.5).signature());
}

TEST_CASE("corpus_user_id formatting") {
  CHECK(corpus_user_id(0) == "u00");
  CHECK(corpus_user_id(7) == "u07");
  CHECK(corpus_user_id(26) == "u26");
}

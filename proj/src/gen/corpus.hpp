#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/sample.hpp"
#include "gen/profile.hpp"

namespace ipd {

struct CorpusConfig {
  int n_users = 27;
  uint64_t seed = 1;
  double sigma_sig = 1.0;
  double noise_level = 1.0;
  double rate_hz = 20.0;
  double minutes_per_user = 41.5;
  int n_genuine_pairs = 6;
  int n_synthetic_pairs = 6;
  std::string out_dir;

  void validate() const;  // throws std::invalid_argument on bad config
};

struct SessionMeta {
  std::string user_id;
  std::string session_id;
  std::string file;  // path relative to the corpus directory
  int task_id = 0;
  Subaction subaction = Subaction::Nio;
  App platform = App::Other;
  double t0 = 0.0;
  double duration_s = 0.0;
};

struct PairSpec {
  std::string victim;
  std::string abuser;
  std::string pair_type;  // "genuine" | "synthetic"
};

struct CorpusManifest {
  uint64_t seed = 0;
  double sigma_sig = 0.0;
  double noise_level = 1.0;
  double rate_hz = 20.0;
  double minutes_per_user = 0.0;
  std::vector<std::string> users;
  std::vector<SessionMeta> sessions;  // ordered by (user, t0)
  std::vector<PairSpec> pairs;
  std::string dir;  // corpus root; set on load/generate, not serialized

  std::vector<const SessionMeta*> sessions_of(const std::string& user_id) const;
};

// Generate traces + manifest under config.out_dir. Deterministic: identical
// configs produce byte-identical directory contents.
CorpusManifest generate_corpus(const CorpusConfig& config);

void save_manifest(const CorpusManifest& m, const std::string& dir);
CorpusManifest load_manifest(const std::string& dir);  // throws if missing/invalid

// The profile used for a given user index under this corpus seed.
UserProfile corpus_profile(uint64_t corpus_seed, double sigma_sig, int user_index);

std::string corpus_user_id(int user_index);  // "u00", "u01", ...

}  // namespace ipd

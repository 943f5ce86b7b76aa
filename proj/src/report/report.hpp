#pragma once

#include <string>
#include <variant>
#include <vector>

#include "report/artifacts.hpp"

namespace ipd {

// Owner-verdict entries structurally cannot leak usage details: the record
// type has timestamps only, no app or intent members.
struct OwnerEntry {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct NonOwnerEntry {
  double t_start = 0.0;
  double t_end = 0.0;
  bool risk = false;  // true = "IPI risk detected" (fused verdict)
  std::string app;
  double fusion_score = 0.0;
  std::vector<std::pair<std::string, double>> top_intents;  // name, probability
};

using ReportEntry = std::variant<OwnerEntry, NonOwnerEntry>;

struct ReportHeader {
  int format_version = 1;
  std::string ae_hash;      // hex
  std::string config_hash;  // hex
  double threshold = 0.0;
  int fusion_k = 1;
  int top_k = 3;
  std::string granularity;
  // Encryption at rest and remote wipe are deployment concerns handled
  // outside this artifact; the header records that explicitly.
  std::string security_note =
      "plaintext report; encryption-at-rest and self-destruct are out of scope";
};

struct ForensicReport {
  ReportHeader header;
  std::vector<ReportEntry> entries;  // strictly increasing t_start

  int flagged_count() const;

  // JSONL: one header line, then one line per entry. Owner lines carry
  // {start, end, verdict} and nothing else.
  void save(const std::string& path) const;
  static ForensicReport load(const std::string& path);
  nn::json to_json() const;  // {header, entries: [...]} for tests/tools
};

struct DetectionConfig {
  std::string trace_path;
  std::string models_dir;
  std::string out_path;  // empty = do not write
  int top_k = 3;         // intents listed per non-owner entry
  WindowOptions windows;
};

// Offline batch detection over one logged trace: windows -> branch
// inference -> TCM -> fusion -> privacy-filtered entries, time-ordered.
// Deterministic given the trace and artifact directory.
ForensicReport run_detection(const DetectionConfig& cfg);

}  // namespace ipd

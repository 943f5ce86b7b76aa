#pragma once

#include <string>
#include <vector>

#include "core/sample.hpp"

namespace ipd {

// Sessions are stored one-sample-per-line JSONL with fixed key order:
//   {"t", "imu", "sys", "int_rate", "int_event", "app",
//    "user_id", "session_id", "subaction"}
// Floats are emitted with enough digits to round-trip exactly, so a fixed
// seed yields byte-identical files.
void write_session_jsonl(const SessionTrace& trace, const std::string& path);
SessionTrace read_session_jsonl(const std::string& path);

// Convenience: every *.jsonl under dir (non-recursive), sorted by filename.
std::vector<std::string> list_session_files(const std::string& dir);

}  // namespace ipd

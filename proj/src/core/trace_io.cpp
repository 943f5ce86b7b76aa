#include "core/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "core/taxonomy.hpp"
#include "nlohmann/json.hpp"

namespace ipd {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {
// Values are quantized to 1e-4 before serialization: keeps files compact and
// makes write -> read -> write byte-stable.
double r4(double v) { return std::round(v * 1e4) / 1e4; }

template <size_t N>
ordered_json rounded(const std::array<float, N>& a) {
  ordered_json out = ordered_json::array();
  for (float v : a) out.push_back(r4(static_cast<double>(v)));
  return out;
}
}  // namespace

void write_session_jsonl(const SessionTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_session_jsonl: cannot open " + path);
  }
  for (const auto& s : trace.samples) {
    ordered_json j;
    j["t"] = r4(s.t);
    j["imu"] = rounded(s.imu);
    j["sys"] = rounded(s.sys);
    j["int_rate"] = r4(static_cast<double>(s.int_rate));
    j["int_event"] = name(s.int_event);
    j["app"] = name(s.app);
    j["user_id"] = trace.user_id;
    j["session_id"] = trace.session_id;
    j["subaction"] = name(trace.subaction);
    out << j.dump() << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_session_jsonl: write failed for " + path);
  }
}

SessionTrace read_session_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_session_jsonl: cannot open " + path);
  }
  SessionTrace trace;
  bool first = true;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("read_session_jsonl: " + path + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
    MultimodalSample s{};
    s.t = j.at("t").get<double>();
    const auto imu = j.at("imu").get<std::vector<float>>();
    const auto sys = j.at("sys").get<std::vector<float>>();
    if (imu.size() != kImuDim || sys.size() != kSysDim) {
      throw std::runtime_error("read_session_jsonl: bad imu/sys arity at " + path + ":" +
                               std::to_string(line_no));
    }
    std::copy(imu.begin(), imu.end(), s.imu.begin());
    std::copy(sys.begin(), sys.end(), s.sys.begin());
    s.int_rate = j.at("int_rate").get<float>();
    s.int_event = int_event_from_name(j.at("int_event").get<std::string>());
    s.app = app_from_name(j.at("app").get<std::string>());
    if (first) {
      trace.user_id = j.at("user_id").get<std::string>();
      trace.session_id = j.at("session_id").get<std::string>();
      trace.subaction = subaction_from_name(j.at("subaction").get<std::string>());
      first = false;
    }
    trace.samples.push_back(s);
  }
  if (first) {
    throw std::runtime_error("read_session_jsonl: no samples in " + path);
  }
  if (trace.samples.size() >= 2) {
    // The sampling rate is not stored per line; recover it from the median
    // timestamp step (robust to the 1e-4 serialization quantum).
    std::vector<double> dts;
    dts.reserve(trace.samples.size() - 1);
    for (size_t i = 1; i < trace.samples.size(); ++i) {
      dts.push_back(trace.samples[i].t - trace.samples[i - 1].t);
    }
    std::nth_element(dts.begin(), dts.begin() + static_cast<long>(dts.size() / 2), dts.end());
    const double dt = dts[dts.size() / 2];
    if (dt > 0.0) trace.rate_hz = 1.0 / dt;
  }
  if (!trace.samples.empty()) {
    // Platform is the dominant non-OTHER app of the session, if any.
    std::array<int, kNumApps> counts{};
    for (const auto& s : trace.samples) counts[static_cast<size_t>(s.app)]++;
    int best = static_cast<int>(App::Other);
    int best_count = -1;
    for (int a = 0; a < kNumApps - 1; ++a) {
      if (counts[static_cast<size_t>(a)] > best_count && counts[static_cast<size_t>(a)] > 0) {
        best = a;
        best_count = counts[static_cast<size_t>(a)];
      }
    }
    trace.platform = best_count > 0 ? static_cast<App>(best) : App::Other;
  }
  return trace;
}

std::vector<std::string> list_session_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace ipd

#include "nn/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace ipd::nn {

json mat_to_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<float> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = std::move(data);
  return j;
}

Mat mat_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<float>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("mat_from_json: data length mismatch");
  }
  Mat m(rows, cols);
  size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++];
  }
  return m;
}

void params_to_json(json& root, const std::string& key, const std::vector<Param*>& params) {
  json block;
  for (const Param* p : params) block[p->name] = mat_to_json(p->value);
  root[key] = std::move(block);
}

void params_from_json(const json& root, const std::string& key, const std::vector<Param*>& params) {
  const json& block = root.at(key);
  for (Param* p : params) {
    if (!block.contains(p->name)) {
      throw std::runtime_error("params_from_json: missing param " + p->name);
    }
    Mat m = mat_from_json(block.at(p->name));
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
      throw std::runtime_error("params_from_json: shape mismatch for " + p->name);
    }
    p->value = std::move(m);
  }
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_json: cannot open " + path);
  out << j.dump() << '\n';
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_json: cannot open " + path);
  return json::parse(in);
}

}  // namespace ipd::nn

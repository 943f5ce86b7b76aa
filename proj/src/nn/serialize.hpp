#pragma once

#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "nn/matrix.hpp"
#include "nn/param.hpp"

namespace ipd::nn {

using json = nlohmann::ordered_json;

json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);

// Writes each param under root[key][param.name]; loads back by name and
// checks shapes. Throws on missing params or shape mismatch.
void params_to_json(json& root, const std::string& key, const std::vector<Param*>& params);
void params_from_json(const json& root, const std::string& key, const std::vector<Param*>& params);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

}  // namespace ipd::nn

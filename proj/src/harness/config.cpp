// Copyright 2026 The aginglab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <fstream>
#include <set>
#include <sstream>

#include "aging/harness.hpp"

namespace aging::harness {

// Defined in experiments.cpp; throws ConfigError on invalid parameters.
void validate_experiment(const ExperimentConfig& exp, const std::string& path);

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(path + "." + key + ": unknown key");
    }
  }
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(path + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

Model parse_model(std::string_view name) {
  if (name == "closedform") return Model::closedform;
  if (name == "tasep") return Model::tasep;
  if (name == "lpp") return Model::lpp;
  if (name == "polymer") return Model::polymer;
  if (name == "glew") return Model::glew;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

std::string_view model_name(Model m) {
  switch (m) {
    case Model::closedform: return "closedform";
    case Model::tasep: return "tasep";
    case Model::lpp: return "lpp";
    case Model::polymer: return "polymer";
    case Model::glew: return "glew";
  }
  return "?";
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, {"master_seed", "workers", "output", "record_wall_time",
                   "experiments"},
             "config");
  RunConfig cfg;
  if (!doc.contains("master_seed")) {
    throw ConfigError("config.master_seed: required");
  }
  cfg.master_seed = get_u64(doc["master_seed"], "config.master_seed");
  if (doc.contains("workers")) {
    const auto w = get_u64(doc["workers"], "config.workers");
    if (w > 4096) throw ConfigError("config.workers: too large");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string() || doc["output"].get<std::string>().empty()) {
      throw ConfigError("config.output: expected a nonempty string");
    }
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("record_wall_time")) {
    if (!doc["record_wall_time"].is_boolean()) {
      throw ConfigError("config.record_wall_time: expected a boolean");
    }
    cfg.record_wall_time = doc["record_wall_time"].get<bool>();
  }
  if (!doc.contains("experiments") || !doc["experiments"].is_array() ||
      doc["experiments"].empty()) {
    throw ConfigError("config.experiments: expected a nonempty array");
  }
  std::set<std::string> ids;
  std::size_t index = 0;
  for (const auto& e : doc["experiments"]) {
    const std::string path = "config.experiments[" + std::to_string(index++) + "]";
    check_keys(e, {"id", "model", "measure", "params", "replicas"}, path);
    ExperimentConfig exp;
    if (!e.contains("id") || !e["id"].is_string() ||
        e["id"].get<std::string>().empty()) {
      throw ConfigError(path + ".id: expected a nonempty string");
    }
    exp.id = e["id"].get<std::string>();
    if (exp.id.find_first_of(",\"\n\r") != std::string::npos) {
      throw ConfigError(path + ".id: must not contain commas, quotes or newlines");
    }
    if (!ids.insert(exp.id).second) {
      throw ConfigError(path + ".id: duplicate id '" + exp.id + "'");
    }
    if (!e.contains("model") || !e["model"].is_string()) {
      throw ConfigError(path + ".model: expected a string");
    }
    try {
      exp.model = parse_model(e["model"].get<std::string>());
    } catch (const ConfigError& err) {
      throw ConfigError(path + ".model: " + err.what());
    }
    if (!e.contains("measure") || !e["measure"].is_string()) {
      throw ConfigError(path + ".measure: expected a string");
    }
    exp.measure = e["measure"].get<std::string>();
    if (e.contains("params")) {
      if (!e["params"].is_object()) {
        throw ConfigError(path + ".params: expected an object");
      }
      exp.params = e["params"];
    }
    if (e.contains("replicas")) {
      exp.replicas =
          static_cast<std::size_t>(get_u64(e["replicas"], path + ".replicas"));
    }
    validate_experiment(exp, path);
    cfg.experiments.push_back(std::move(exp));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace aging::harness

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


#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace aging::harness {

/// Invalid configuration or input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Model { closedform, tasep, lpp, polymer, glew };

Model parse_model(std::string_view name);
std::string_view model_name(Model m);

struct ExperimentConfig {
  std::string id;
  Model model = Model::closedform;
  std::string measure;
  nlohmann::json params = nlohmann::json::object();
  std::size_t replicas = 0;
};

struct RunConfig {
  std::uint64_t master_seed = 0;
  unsigned workers = 0;  // 0: AGING_WORKERS or hardware concurrency
  std::string output;
  bool record_wall_time = false;
  std::vector<ExperimentConfig> experiments;
};

/// Parses and validates a run configuration. Unknown keys and values that
/// violate a module's preconditions raise ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

struct ResultRow {
  std::string experiment;
  std::string params;
  double estimate = 0.0;
  std::optional<double> std_err;
  std::optional<double> reference;
  std::optional<std::uint64_t> n;
  std::optional<double> wall_s;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,params,estimate,stderr,reference,n,wall_s";

/// Shortest decimal string that round-trips.
std::string format_double(double x);
std::string format_row(const ResultRow& row);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Writes to a temporary sibling file, then renames it over `path`.
void write_csv_atomic(const std::string& path,
                      const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_csv_file(const std::string& path);

/// Runs every experiment. `workers_override` > 0 replaces the config value.
std::vector<ResultRow> run_experiments(const RunConfig& cfg,
                                       unsigned workers_override = 0);

/// Closed-form functions addressable by name from configs and the CLI.
struct FunctionInfo {
  std::string name;
  std::vector<std::string> args;
  std::function<double(const std::vector<double>&)> eval;
};

const std::vector<FunctionInfo>& function_table();
const FunctionInfo& find_function(std::string_view name);

/// Evaluates "name(arg, ...)" or a plain number.
double evaluate_reference(std::string_view expr);

/// Grid syntax: comma-separated points with arguments joined by '/', or
/// "lo:hi:count" for single-argument functions.
std::vector<std::vector<double>> parse_grid(std::string_view grid,
                                            std::size_t arity);

std::vector<ResultRow> table(std::string_view function, std::string_view grid);

struct Tolerance {
  double abs_tol = 0.0;
  double z = 3.0;
  std::optional<std::string> reference;
};

struct ToleranceSpec {
  Tolerance fallback;
  std::vector<std::pair<std::string, Tolerance>> per_experiment;
  const Tolerance& lookup(const std::string& experiment) const;
};

ToleranceSpec parse_tolerance(const nlohmann::json& doc);

struct CompareOutcome {
  bool pass = true;
  std::vector<std::string> lines;
};

/// |estimate - reference| <= max(abs_tol, z * stderr) per row.
CompareOutcome compare(const std::vector<ResultRow>& rows,
                       const ToleranceSpec& spec);

}  // namespace aging::harness

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


// aginglab: run experiment configs, compare results, tabulate closed forms.

#include <exception>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aging/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCompareFailed = 1;
constexpr int kError = 2;

}  // namespace

int main(int argc, char** argv) {
  namespace h = aging::harness;
  CLI::App app{"Aging experiments for stationary growth models"};
  app.require_subcommand(1);

  std::string config_path, output;
  unsigned workers = 0;
  auto* run = app.add_subcommand("run", "Run the experiments in a config file");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("-w,--workers", workers, "Worker threads (overrides config)");
  run->add_option("-o,--output", output, "CSV path (overrides config)");

  std::string csv_path, tol_path;
  auto* cmp = app.add_subcommand("compare", "Check results against references");
  cmp->add_option("csv", csv_path, "Results CSV")->required();
  cmp->add_option("tolspec", tol_path, "Tolerance JSON")->required();

  std::string function, grid;
  auto* tab = app.add_subcommand("table", "Tabulate a closed-form function");
  tab->add_option("function", function, "Function name")->required();
  tab->add_option("grid", grid, "Points, e.g. 1,1.5,2 or 1:4:7 or 1/2/0/0")
      ->required();
  tab->add_flag_callback("--list", [] {
    for (const auto& f : aging::harness::function_table()) {
      std::cout << f.name << '(';
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        std::cout << (i ? ", " : "") << f.args[i];
      }
      std::cout << ")\n";
    }
    std::exit(0);
  }, "List functions and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*run) {
      h::RunConfig cfg = h::load_config(config_path);
      if (!output.empty()) cfg.output = output;
      const auto rows = h::run_experiments(cfg, workers);
      if (cfg.output.empty()) {
        h::write_csv(std::cout, rows);
      } else {
        h::write_csv_atomic(cfg.output, rows);
        std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << '\n';
      }
      return kOk;
    }
    if (*cmp) {
      const auto rows = h::read_csv_file(csv_path);
      std::ifstream in(tol_path);
      if (!in) throw h::ConfigError(tol_path + ": cannot open");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
      } catch (const nlohmann::json::parse_error& e) {
        throw h::ConfigError(tol_path + ": " + e.what());
      }
      const auto outcome = h::compare(rows, h::parse_tolerance(doc));
      for (const auto& line : outcome.lines) std::cout << line << '\n';
      return outcome.pass ? kOk : kCompareFailed;
    }
    if (*tab) {
      h::write_csv(std::cout, h::table(function, grid));
      return kOk;
    }
  } catch (const h::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

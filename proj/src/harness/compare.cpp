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


#include <algorithm>
#include <cmath>

#include "aging/harness.hpp"

namespace aging::harness {

namespace {

using nlohmann::json;

Tolerance parse_entry(const json& j, const Tolerance& base,
                      const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  Tolerance t = base;
  t.reference.reset();
  for (const auto& [key, value] : j.items()) {
    if (key == "abs_tol" || key == "z") {
      if (!value.is_number() || value.get<double>() < 0.0) {
        throw ConfigError(path + "." + key + ": expected a nonnegative number");
      }
      (key == "z" ? t.z : t.abs_tol) = value.get<double>();
    } else if (key == "reference") {
      if (!value.is_string()) throw ConfigError(path + ".reference: expected a string");
      t.reference = value.get<std::string>();
      evaluate_reference(*t.reference);
    } else {
      throw ConfigError(path + "." + key + ": unknown key");
    }
  }
  return t;
}

}  // namespace

const Tolerance& ToleranceSpec::lookup(const std::string& experiment) const {
  for (const auto& [id, tol] : per_experiment) {
    if (id == experiment) return tol;
  }
  return fallback;
}

ToleranceSpec parse_tolerance(const json& doc) {
  if (!doc.is_object()) throw ConfigError("tolerance: expected an object");
  ToleranceSpec spec;
  for (const auto& [key, value] : doc.items()) {
    if (key != "default" && key != "experiments") {
      throw ConfigError("tolerance." + key + ": unknown key");
    }
  }
  if (doc.contains("default")) {
    spec.fallback = parse_entry(doc["default"], spec.fallback, "tolerance.default");
  }
  if (doc.contains("experiments")) {
    const auto& ex = doc["experiments"];
    if (!ex.is_object()) throw ConfigError("tolerance.experiments: expected an object");
    for (const auto& [id, value] : ex.items()) {
      spec.per_experiment.emplace_back(
          id, parse_entry(value, spec.fallback, "tolerance.experiments." + id));
    }
  }
  return spec;
}

CompareOutcome compare(const std::vector<ResultRow>& rows,
                       const ToleranceSpec& spec) {
  CompareOutcome out;
  for (const auto& row : rows) {
    const Tolerance& tol = spec.lookup(row.experiment);
    double reference = 0.0;
    if (row.reference) {
      reference = *row.reference;
    } else if (tol.reference) {
      reference = evaluate_reference(*tol.reference);
    } else {
      throw ConfigError("missing reference for " + row.experiment + " [" +
                        row.params + "]");
    }
    const double se = row.std_err.value_or(0.0);
    const double bound = std::max(tol.abs_tol, tol.z * se);
    const double diff = std::abs(row.estimate - reference);
    const bool ok = diff <= bound;
    out.pass = out.pass && ok;
    out.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + row.experiment +
                        " [" + row.params + "] estimate=" +
                        format_double(row.estimate) + " reference=" +
                        format_double(reference) + " |diff|=" +
                        format_double(diff) + " bound=" + format_double(bound));
  }
  return out;
}

}  // namespace aging::harness

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


#include <charconv>
#include <cmath>
#include <string>

#include "aging/closedform.hpp"
#include "aging/glew.hpp"
#include "aging/harness.hpp"

namespace aging::harness {

namespace {

int as_int(double x, const char* what) {
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw std::invalid_argument(std::string(what) + " must be an integer");
  }
  return static_cast<int>(x);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

const std::vector<FunctionInfo>& function_table() {
  using V = const std::vector<double>&;
  namespace cf = closedform;
  static const std::vector<FunctionInfo> table = {
      {"rho_kpz", {"a"}, [](V a) { return cf::rho_kpz(a[0]); }},
      {"rho_ew", {"a"}, [](V a) { return cf::rho_ew(a[0]); }},
      {"kpz_fp_correlation", {"s", "t"},
       [](V a) { return cf::kpz_fp_correlation(a[0], a[1]); }},
      {"gauss_pdf", {"t", "x"}, [](V a) { return cf::gauss_pdf(a[0], a[1]); }},
      {"gauss_cdf", {"x"}, [](V a) { return cf::gauss_cdf(a[0]); }},
      {"ew_variance", {"t", "x"},
       [](V a) { return cf::ew_variance(a[0], a[1]); }},
      {"ew_correlation", {"a", "b", "x", "y"},
       [](V a) { return cf::ew_correlation(a[0], a[1], a[2], a[3]); }},
      {"bessel_i", {"k", "t"},
       [](V a) { return cf::bessel_i(as_int(a[0], "k"), a[1]); }},
      {"rw_abs_expectation", {"t", "k"},
       [](V a) { return cf::rw_abs_expectation(a[0], as_int(a[1], "k")); }},
      {"gl_quadratic_correlation", {"t1", "j", "t2", "k"},
       [](V a) {
         return glew::quadratic_correlation(a[0], as_int(a[1], "j"), a[2],
                                            as_int(a[3], "k"));
       }},
  };
  return table;
}

const FunctionInfo& find_function(std::string_view name) {
  for (const auto& f : function_table()) {
    if (f.name == name) return f;
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

double evaluate_reference(std::string_view expr) {
  expr = trim(expr);
  const auto open = expr.find('(');
  if (open == std::string_view::npos) return parse_number(expr);
  if (expr.back() != ')') {
    throw ConfigError("bad reference expression '" + std::string(expr) + "'");
  }
  const auto& fn = find_function(trim(expr.substr(0, open)));
  const auto inner = expr.substr(open + 1, expr.size() - open - 2);
  std::vector<double> args;
  if (!trim(inner).empty()) {
    for (auto part : split(inner, ',')) args.push_back(parse_number(part));
  }
  if (args.size() != fn.args.size()) {
    throw ConfigError(fn.name + " takes " + std::to_string(fn.args.size()) +
                      " arguments");
  }
  try {
    return fn.eval(args);
  } catch (const std::logic_error& e) {
    throw ConfigError(fn.name + ": " + e.what());
  }
}

std::vector<std::vector<double>> parse_grid(std::string_view grid,
                                            std::size_t arity) {
  grid = trim(grid);
  if (grid.empty()) throw ConfigError("empty grid");
  std::vector<std::vector<double>> points;
  if (grid.find(':') != std::string_view::npos) {
    const auto parts = split(grid, ':');
    if (parts.size() != 3 || arity != 1) {
      throw ConfigError("range grid 'lo:hi:count' needs a one-argument function");
    }
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count) || count > 1e7) {
      throw ConfigError("grid count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      const double x =
          n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                 static_cast<double>(n - 1);
      points.push_back({x});
    }
    return points;
  }
  for (auto point : split(grid, ',')) {
    std::vector<double> args;
    for (auto a : split(point, '/')) args.push_back(parse_number(a));
    if (args.size() != arity) {
      throw ConfigError("grid point '" + std::string(point) + "' needs " +
                        std::to_string(arity) + " arguments");
    }
    points.push_back(std::move(args));
  }
  return points;
}

std::vector<ResultRow> table(std::string_view function, std::string_view grid) {
  const auto& fn = find_function(function);
  std::vector<ResultRow> rows;
  for (const auto& args : parse_grid(grid, fn.args.size())) {
    ResultRow r;
    r.experiment = fn.name;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) r.params += ';';
      r.params += fn.args[i] + "=" + format_double(args[i]);
    }
    try {
      r.estimate = fn.eval(args);
    } catch (const std::logic_error& e) {
      throw ConfigError(fn.name + "(" + r.params + "): " + e.what());
    }
    r.reference = r.estimate;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace aging::harness

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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "aging/harness.hpp"

namespace aging::harness {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw ConfigError("csv: unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("csv: bad number in " + what + ": '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_row(const ResultRow& row) {
  std::string s = quote(row.experiment);
  s += ',';
  s += quote(row.params);
  s += ',';
  s += format_double(row.estimate);
  s += ',';
  if (row.std_err) s += format_double(*row.std_err);
  s += ',';
  if (row.reference) s += format_double(*row.reference);
  s += ',';
  if (row.n) s += std::to_string(*row.n);
  s += ',';
  if (row.wall_s) s += format_double(*row.wall_s);
  return s;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << format_row(r) << '\n';
}

void write_csv_atomic(const std::string& path,
                      const std::vector<ResultRow>& rows) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write_csv(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("csv: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 7) throw ConfigError("csv: " + where + ": expected 7 fields");
    ResultRow r;
    r.experiment = f[0];
    r.params = f[1];
    r.estimate = parse_double(f[2], where);
    if (!f[3].empty()) r.std_err = parse_double(f[3], where);
    if (!f[4].empty()) r.reference = parse_double(f[4], where);
    if (!f[5].empty()) {
      r.n = static_cast<std::uint64_t>(parse_double(f[5], where));
    }
    if (!f[6].empty()) r.wall_s = parse_double(f[6], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  return read_csv(in);
}

}  // namespace aging::harness

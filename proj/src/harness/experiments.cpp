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
#include <chrono>
#include <cmath>
#include <set>

#include "aging/closedform.hpp"
#include "aging/glew.hpp"
#include "aging/harness.hpp"
#include "aging/lpp.hpp"
#include "aging/parallel.hpp"
#include "aging/polymer.hpp"
#include "aging/statcore.hpp"
#include "aging/tasep.hpp"

namespace aging::harness {

namespace {

using nlohmann::json;

// Typed access to a params object that remembers which keys were read.
class ParamReader {
 public:
  ParamReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {}

  double number(const std::string& key, std::optional<double> fallback = {}) {
    const json* v = get(key);
    if (!v) return require(key, fallback);
    if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key) + ": must be finite");
    return x;
  }

  std::int64_t integer(const std::string& key,
                       std::optional<std::int64_t> fallback = {}) {
    const json* v = get(key);
    if (!v) return require(key, fallback);
    if (!v->is_number_integer()) {
      throw ConfigError(field(key) + ": expected an integer");
    }
    return v->get<std::int64_t>();
  }

  std::string text(const std::string& key,
                   std::optional<std::string> fallback = {}) {
    const json* v = get(key);
    if (!v) return require(key, fallback);
    if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ConfigError(field(key) + ": required");
    if (!v->is_array() || v->empty()) {
      throw ConfigError(field(key) + ": expected a nonempty array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw ConfigError(field(key) + ": expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::vector<double>> points(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ConfigError(field(key) + ": required");
    if (!v->is_array() || v->empty()) {
      throw ConfigError(field(key) + ": expected a nonempty array");
    }
    std::vector<std::vector<double>> out;
    for (const auto& p : *v) {
      std::vector<double> args;
      if (p.is_number()) {
        args.push_back(p.get<double>());
      } else if (p.is_array()) {
        for (const auto& x : p) {
          if (!x.is_number()) throw ConfigError(field(key) + ": expected numbers");
          args.push_back(x.get<double>());
        }
      } else {
        throw ConfigError(field(key) + ": expected numbers or arrays");
      }
      out.push_back(std::move(args));
    }
    return out;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.contains(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

  std::string field(const std::string& key) const {
    return path_ + ".params." + key;
  }

 private:
  const json* get(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) {
    if (!fallback) throw ConfigError(field(key) + ": required");
    return *fallback;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

std::string format_value(const json& v) {
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) {
      if (!s.empty()) s += '/';
      s += format_value(x);
    }
    return s;
  }
  return v.dump();
}

std::string params_string(const json& params,
                          const std::vector<std::pair<std::string, std::string>>&
                              extra = {}) {
  std::string s;
  for (const auto& [key, value] : params.items()) {
    if (!s.empty()) s += ';';
    s += key + "=" + format_value(value);
  }
  for (const auto& [key, value] : extra) {
    if (!s.empty()) s += ';';
    s += key + "=" + value;
  }
  return s;
}

using Runner = std::function<std::vector<ResultRow>(rng::Key, unsigned)>;

void need_replicas(const ExperimentConfig& exp, const std::string& path,
                   std::size_t minimum) {
  if (exp.replicas < minimum) {
    throw ConfigError(path + ".replicas: need at least " +
                      std::to_string(minimum));
  }
}

template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".params: " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(path + ".params: " + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(path + ".params: " + e.what());
  }
}

ResultRow make_row(const ExperimentConfig& exp, std::string params,
                   double estimate, std::optional<double> se,
                   std::optional<double> reference,
                   std::optional<std::uint64_t> n) {
  ResultRow row;
  row.experiment = exp.id;
  row.params = std::move(params);
  row.estimate = estimate;
  row.std_err = se;
  row.reference = reference;
  row.n = n;
  return row;
}

Runner plan_closedform(const ExperimentConfig& exp, const std::string& path) {
  ParamReader p(exp.params, path);
  const FunctionInfo* fn = nullptr;
  try {
    fn = &find_function(exp.measure);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ".measure: " + e.what());
  }
  std::vector<std::vector<double>> pts;
  if (p.has("grid")) {
    const std::string grid = p.text("grid");
    pts = guarded(path, [&] { return parse_grid(grid, fn->args.size()); });
  } else {
    pts = p.points("points");
  }
  p.finish();
  for (const auto& a : pts) {
    if (a.size() != fn->args.size()) {
      throw ConfigError(p.field("points") + ": wrong number of arguments for " +
                        fn->name);
    }
    guarded(path, [&] { return fn->eval(a); });
  }
  return [exp, fn, pts](rng::Key, unsigned) {
    std::vector<ResultRow> rows;
    for (const auto& a : pts) {
      std::vector<std::pair<std::string, std::string>> args;
      for (std::size_t i = 0; i < a.size(); ++i) {
        args.emplace_back(fn->args[i], format_double(a[i]));
      }
      const double v = fn->eval(a);
      rows.push_back(make_row(exp, params_string(json::object(), args), v, {},
                              v, {}));
    }
    return rows;
  };
}

Runner plan_tasep(const ExperimentConfig& exp, const std::string& path) {
  ParamReader p(exp.params, path);
  if (exp.measure == "two_time_corr") {
    tasep::TwoTimeConfig c;
    c.L = static_cast<std::size_t>(p.integer("L", 2048));
    c.s = p.number("s", 50.0);
    c.a = p.number("a", 2.0);
    c.j = p.integer("j", 0);
    c.k = p.integer("k", 0);
    c.replicas = exp.replicas;
    p.finish();
    guarded(path, [&] { tasep::validate(c); return 0; });
    return [exp, c](rng::Key key, unsigned workers) {
      const auto res = tasep::two_time_height_corr(c, key, workers);
      const double ref = closedform::rho_kpz(c.a);
      return std::vector<ResultRow>{
          make_row(exp, params_string(exp.params, {{"estimator", "direct"}}),
                   res.direct.value, res.direct.std_err, ref, res.direct.n),
          make_row(exp, params_string(exp.params, {{"estimator", "cvtv"}}),
                   res.cvtv.value, res.cvtv.std_err, ref, res.cvtv.n)};
    };
  }
  if (exp.measure == "density" || exp.measure == "flux") {
    const std::int64_t L = p.integer("L", 4096);
    const double t = p.number("t");
    p.finish();
    if (L < 2) throw ConfigError(p.field("L") + ": must be >= 2");
    if (!(t >= 0.0)) throw ConfigError(p.field("t") + ": must be >= 0");
    need_replicas(exp, path, 2);
    const bool density = exp.measure == "density";
    return [exp, L, t, density](rng::Key key, unsigned workers) {
      std::vector<double> v(exp.replicas);
      parallel_for(exp.replicas, workers, [&](std::size_t r) {
        auto ring = tasep::Ring::stationary(static_cast<std::size_t>(L),
                                            rng::Stream(key, r));
        ring.evolve_until(t);
        v[r] = density ? static_cast<double>(ring.particle_count()) /
                             static_cast<double>(L)
                       : static_cast<double>(ring.flux(0));
      });
      stat::MomentAccumulator acc;
      for (double x : v) acc.add(x);
      const double ref = density ? 0.5 : t / 4.0;
      return std::vector<ResultRow>{make_row(exp, params_string(exp.params),
                                             acc.mean(), acc.stderr_mean(),
                                             ref, acc.count())};
    };
  }
  throw ConfigError(path + ".measure: unknown tasep measure '" + exp.measure + "'");
}

Runner plan_lpp(const ExperimentConfig& exp, const std::string& path) {
  ParamReader p(exp.params, path);
  if (exp.measure == "aging_corr") {
    lpp::LppConfig c;
    c.n = p.integer("n");
    c.a = p.number("a", 2.0);
    c.replicas = exp.replicas;
    p.finish();
    guarded(path, [&] { lpp::validate(c); return 0; });
    need_replicas(exp, path, 100);
    return [exp, c](rng::Key key, unsigned workers) {
      const auto est = lpp::lpp_aging_corr(c, key, workers);
      return std::vector<ResultRow>{make_row(exp, params_string(exp.params),
                                             est.value, est.std_err,
                                             closedform::rho_kpz(c.a), est.n)};
    };
  }
  if (exp.measure == "variance_ratio") {
    const std::int64_t n = p.integer("n");
    p.finish();
    if (n < 1) throw ConfigError(p.field("n") + ": must be >= 1");
    need_replicas(exp, path, 4);
    return [exp, n](rng::Key key, unsigned workers) {
      std::vector<double> small(exp.replicas), big(exp.replicas);
      const std::int64_t sizes[2] = {n, 2 * n};
      parallel_for(exp.replicas, workers, [&](std::size_t r) {
        const auto v = lpp::diagonal_sweep(key, r, sizes);
        small[r] = v[0];
        big[r] = v[1];
      });
      const auto vs = stat::variance_estimate(small);
      const auto vb = stat::variance_estimate(big);
      const double ratio = vb.value / vs.value;
      const double se = ratio * std::hypot(vs.std_err / vs.value,
                                           vb.std_err / vb.value);
      return std::vector<ResultRow>{make_row(exp, params_string(exp.params),
                                             ratio, se, std::cbrt(4.0),
                                             exp.replicas)};
    };
  }
  if (exp.measure == "burke") {
    const std::int64_t n1 = p.integer("n1");
    const std::int64_t count = p.integer("count", 10000);
    p.finish();
    if (n1 < 1) throw ConfigError(p.field("n1") + ": must be >= 1");
    if (count < 10) throw ConfigError(p.field("count") + ": must be >= 10");
    const std::size_t reps = std::max<std::size_t>(exp.replicas, 1);
    return [exp, n1, count, reps](rng::Key key, unsigned workers) {
      std::vector<std::vector<double>> parts(reps);
      parallel_for(reps, workers, [&](std::size_t r) {
        parts[r] = lpp::row_increments(key, r, n1, count);
      });
      std::vector<double> all;
      for (auto& v : parts) all.insert(all.end(), v.begin(), v.end());
      stat::MomentAccumulator acc;
      for (double x : all) acc.add(x);
      const stat::EmpiricalDistribution dist(std::move(all));
      const double ks = stat::ks_statistic(
          dist, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-0.5 * x); });
      return std::vector<ResultRow>{
          make_row(exp, params_string(exp.params, {{"statistic", "mean"}}),
                   acc.mean(), acc.stderr_mean(), 2.0, acc.count()),
          make_row(exp, params_string(exp.params, {{"statistic", "ks"}}), ks,
                   {}, {}, acc.count())};
    };
  }
  if (exp.measure == "identity") {
    const auto n = p.integer("n", 5);
    const auto ts = p.numbers("t");
    const auto ring = p.integer("ring_replicas", 0);
    p.finish();
    if (n < 1 || n > 64) throw ConfigError(p.field("n") + ": must be in [1, 64]");
    for (double t : ts) {
      if (!(t > 0.0)) throw ConfigError(p.field("t") + ": times must be > 0");
    }
    if (ring < 0) throw ConfigError(p.field("ring_replicas") + ": must be >= 0");
    need_replicas(exp, path, 1);
    return [exp, n, ts, ring](rng::Key key, unsigned workers) {
      const auto table = lpp::lpp_tasep_identity_check(
          static_cast<int>(n), ts, exp.replicas, static_cast<std::size_t>(ring),
          key, workers);
      std::vector<ResultRow> rows;
      for (const auto& row : table) {
        rows.push_back(make_row(
            exp,
            params_string(exp.params, {{"at", format_double(row.t)},
                                       {"p_lpp", format_double(row.p_lpp)},
                                       {"p_tasep", format_double(row.p_tasep)}}),
            row.p_lpp - row.p_tasep, std::hypot(row.se_lpp, row.se_tasep), 0.0,
            exp.replicas));
      }
      return rows;
    };
  }
  throw ConfigError(path + ".measure: unknown lpp measure '" + exp.measure + "'");
}

polymer::Params read_polymer_params(ParamReader& p) {
  polymer::Params q;
  q.n = static_cast<int>(p.integer("n", 32));
  q.theta = p.number("theta", 0.0);
  q.beta = p.number("beta", 1.0);
  q.dt = p.number("dt", 1e-4);
  q.levels = static_cast<int>(p.integer("levels", 512));
  return q;
}

Runner plan_polymer(const ExperimentConfig& exp, const std::string& path) {
  ParamReader p(exp.params, path);
  if (exp.measure == "two_time_corr") {
    polymer::TwoTimeConfig c;
    c.params = read_polymer_params(p);
    c.s = p.number("s", 1.0);
    c.t = p.number("t", 2.0);
    c.x = p.number("x", 0.0);
    c.y = p.number("y", 0.0);
    c.replicas = exp.replicas;
    p.finish();
    need_replicas(exp, path, 100);
    guarded(path, [&] { return polymer::observation_points(c); });
    return [exp, c](rng::Key key, unsigned workers) {
      const auto res = polymer::polymer_two_time_corr(c, key, workers);
      const std::vector<std::pair<std::string, std::string>> tag = {
          {"aborted", std::to_string(res.aborted)},
          {"valid", res.valid ? "true" : "false"}};
      auto with = [&](const char* est) {
        auto t = tag;
        t.emplace_back("estimator", est);
        return params_string(exp.params, t);
      };
      return std::vector<ResultRow>{
          make_row(exp, with("direct"), res.direct.value, res.direct.std_err,
                   {}, res.direct.n),
          make_row(exp, with("cvtv"), res.cvtv.value, res.cvtv.std_err, {},
                   res.cvtv.n)};
    };
  }
  if (exp.measure == "burke") {
    const polymer::Params q0 = read_polymer_params(p);
    const double t = p.number("t", 1.0);
    p.finish();
    if (!(t >= 0.0)) throw ConfigError(p.field("t") + ": must be >= 0");
    const polymer::Params q = guarded(path, [&] { return polymer::resolve(q0); });
    need_replicas(exp, path, 1);
    return [exp, q, t](rng::Key key, unsigned workers) {
      std::vector<std::vector<double>> parts(exp.replicas);
      parallel_for(exp.replicas, workers, [&](std::size_t r) {
        parts[r] = polymer::residuals_at(q, t, key, r);
      });
      std::vector<double> all;
      std::size_t aborted = 0;
      for (auto& v : parts) {
        if (v.empty()) ++aborted;
        all.insert(all.end(), v.begin(), v.end());
      }
      const bool valid = static_cast<double>(aborted) <
                         polymer::kMaxAbortedFraction *
                             static_cast<double>(exp.replicas);
      const std::vector<std::pair<std::string, std::string>> tag = {
          {"aborted", std::to_string(aborted)},
          {"valid", valid ? "true" : "false"}};
      std::vector<ResultRow> rows;
      if (all.empty()) return rows;
      stat::MomentAccumulator acc;
      for (double x : all) acc.add(x / q.theta);
      const stat::EmpiricalDistribution dist(std::move(all));
      const double ks = stat::ks_statistic(
          dist, [&](double x) { return polymer::gamma_cdf(q.theta, x); });
      auto with = [&](const char* s) {
        auto tg = tag;
        tg.emplace_back("statistic", s);
        return params_string(exp.params, tg);
      };
      rows.push_back(make_row(exp, with("mean_ratio"), acc.mean(),
                              acc.count() >= 2 ? std::optional(acc.stderr_mean())
                                               : std::nullopt,
                              1.0, acc.count()));
      rows.push_back(make_row(exp, with("ks"), ks, {}, {}, acc.count()));
      return rows;
    };
  }
  throw ConfigError(path + ".measure: unknown polymer measure '" + exp.measure +
                    "'");
}

glew::Potential read_potential(ParamReader& p) {
  const std::string kind = p.text("potential", "quadratic");
  if (kind == "quadratic") {
    if (p.has("kappa")) {
      throw ConfigError(p.field("kappa") + ": only valid for sqrt_perturbed");
    }
    return glew::Potential::quadratic();
  }
  if (kind == "sqrt_perturbed") {
    const double kappa = p.number("kappa", 1.0);
    if (!(kappa >= 0.0)) throw ConfigError(p.field("kappa") + ": must be >= 0");
    return glew::Potential::sqrt_perturbed(kappa);
  }
  throw ConfigError(p.field("potential") + ": unknown potential '" + kind + "'");
}

Runner plan_glew(const ExperimentConfig& exp, const std::string& path) {
  ParamReader p(exp.params, path);
  const glew::Potential v = read_potential(p);
  if (exp.measure == "variance_profile") {
    const auto L = p.integer("L", 256);
    const double t = p.number("t");
    const double dt = p.number("dt", 1e-3);
    std::vector<std::int64_t> sites;
    for (double k : p.numbers("sites")) {
      if (k != std::floor(k)) throw ConfigError(p.field("sites") + ": integers only");
      sites.push_back(static_cast<std::int64_t>(k));
    }
    p.finish();
    need_replicas(exp, path, 4);
    if (L < 2) throw ConfigError(p.field("L") + ": must be >= 2");
    if (!(t >= 0.0)) throw ConfigError(p.field("t") + ": must be >= 0");
    guarded(path, [&] { glew::check_step(v, dt); return 0; });
    for (auto k : sites) {
      if (!glew::inside_window(static_cast<std::size_t>(L), t, k)) {
        throw ConfigError(p.field("sites") + ": site outside the safe window");
      }
    }
    return [exp, v, L, t, dt, sites](rng::Key key, unsigned workers) {
      const auto prof = glew::gl_variance_profile(
          v, static_cast<std::size_t>(L), t, dt, sites, exp.replicas, key,
          workers);
      std::vector<ResultRow> rows;
      for (const auto& row : prof) {
        std::optional<double> ref;
        if (v.kind() == glew::PotentialKind::quadratic) {
          ref = closedform::rw_abs_expectation(t, static_cast<int>(row.k));
        }
        json base = exp.params;
        base.erase("sites");
        rows.push_back(make_row(
            exp, params_string(base, {{"k", std::to_string(row.k)}}),
            row.var.value, row.var.std_err, ref, row.var.n));
      }
      return rows;
    };
  }
  if (exp.measure == "two_time_corr") {
    glew::TwoTimeConfig c;
    c.s = p.number("s", 4.0);
    c.a = p.number("a", 2.0);
    c.x = p.number("x", 0.0);
    c.y = p.number("y", 0.0);
    c.L = static_cast<std::size_t>(p.integer("L", 512));
    c.dt = p.number("dt", 1e-3);
    c.replicas = exp.replicas;
    p.finish();
    need_replicas(exp, path, 100);
    guarded(path, [&] {
      glew::check_step(v, c.dt);
      if (!(c.s > 0.0) || !(c.a >= 1.0)) {
        throw std::invalid_argument("need s > 0 and a >= 1");
      }
      const double rs = std::sqrt(c.s);
      const auto j = static_cast<std::int64_t>(std::floor(c.x * rs));
      const auto k = static_cast<std::int64_t>(std::floor(c.y * rs));
      for (auto site : {j, k, k - j}) {
        if (!glew::inside_window(c.L, c.a * c.s, site)) {
          throw std::invalid_argument("sites outside the safe window");
        }
      }
      return 0;
    });
    return [exp, v, c](rng::Key key, unsigned workers) {
      const auto res = glew::gl_two_time_corr(v, c, key, workers);
      const double ref = closedform::ew_correlation(1.0, c.a, c.x, c.y);
      return std::vector<ResultRow>{
          make_row(exp, params_string(exp.params, {{"estimator", "direct"}}),
                   res.direct.value, res.direct.std_err, ref, res.direct.n),
          make_row(exp, params_string(exp.params, {{"estimator", "cvtv"}}),
                   res.cvtv.value, res.cvtv.std_err, ref, res.cvtv.n)};
    };
  }
  throw ConfigError(path + ".measure: unknown glew measure '" + exp.measure + "'");
}

Runner plan(const ExperimentConfig& exp, const std::string& path) {
  switch (exp.model) {
    case Model::closedform: return plan_closedform(exp, path);
    case Model::tasep: return plan_tasep(exp, path);
    case Model::lpp: return plan_lpp(exp, path);
    case Model::polymer: return plan_polymer(exp, path);
    case Model::glew: return plan_glew(exp, path);
  }
  throw ConfigError(path + ".model: unsupported");
}

}  // namespace

void validate_experiment(const ExperimentConfig& exp, const std::string& path) {
  plan(exp, path);
}

std::vector<ResultRow> run_experiments(const RunConfig& cfg,
                                       unsigned workers_override) {
  const unsigned workers = workers_override > 0 ? workers_override
                           : cfg.workers > 0    ? cfg.workers
                                                : default_workers();
  std::vector<ResultRow> all;
  std::size_t index = 0;
  for (const auto& exp : cfg.experiments) {
    const std::string path = "config.experiments[" + std::to_string(index++) + "]";
    const Runner runner = plan(exp, path);
    const auto start = std::chrono::steady_clock::now();
    auto rows = runner(rng::derive_key(cfg.master_seed, exp.id), workers);
    const std::chrono::duration<double> wall =
        std::chrono::steady_clock::now() - start;
    for (auto& r : rows) {
      if (cfg.record_wall_time) r.wall_s = wall.count();
      all.push_back(std::move(r));
    }
  }
  return all;
}

}  // namespace aging::harness

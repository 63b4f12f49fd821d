// Copyright 2026 The Authors.
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

#include "fairrec/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fairrec/baselines.h"
#include "fairrec/fair_opt.h"
#include "fairrec/online_form.h"
#include "fairrec/rng.h"

namespace fairrec {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInstanceStream = 101;

double draw(Rng& rng, const Range& range) {
  return range.lo + (range.hi - range.lo) * rng.Uniform();
}

void check_range(const Range& r, const char* name, bool open_unit) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string(name) + " range is invalid");
  }
  if (open_unit && !(r.lo > 0.0 && r.hi < 1.0)) {
    throw std::invalid_argument(std::string(name) +
                                " range must lie inside (0, 1)");
  }
}

std::vector<double> draw_arrivals(Rng& rng, std::size_t m, const Range& range) {
  std::vector<double> p(m);
  double s = 0.0;
  for (double& v : p) {
    v = draw(rng, range);
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

Instance gen_synthetic_instance(std::uint64_t seed, std::size_t n,
                                std::size_t m, const SyntheticRanges& ranges) {
  if (n == 0 || m == 0) throw std::invalid_argument("need N, M >= 1");
  check_range(ranges.y, "y", true);
  check_range(ranges.r, "r", false);
  check_range(ranges.p, "p", false);
  if (!(ranges.p.lo > 0.0)) throw std::invalid_argument("p range must be positive");
  Rng rng(seed, kInstanceStream);
  const std::vector<double> p = draw_arrivals(rng, m, ranges.p);
  Matrix y(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) y(i, j) = draw(rng, ranges.y);
  }
  std::vector<double> r(n);
  for (double& v : r) v = draw(rng, ranges.r);
  return Instance(p, std::move(y), std::move(r), kArrivalSumFileTol);
}

AssortInstance gen_synthetic_assort_instance(std::uint64_t seed, std::size_t n,
                                             std::size_t m, std::size_t K,
                                             const SyntheticRanges& ranges) {
  if (n == 0 || m == 0) throw std::invalid_argument("need N, M >= 1");
  check_range(ranges.w, "w", false);
  check_range(ranges.r, "r", false);
  check_range(ranges.p, "p", false);
  if (!(ranges.w.lo > 0.0)) throw std::invalid_argument("w range must be positive");
  if (!(ranges.p.lo > 0.0)) throw std::invalid_argument("p range must be positive");
  Rng rng(seed, kInstanceStream);
  const std::vector<double> p = draw_arrivals(rng, m, ranges.p);
  Matrix w(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) w(i, j) = draw(rng, ranges.w);
  }
  std::vector<double> r(n);
  for (double& v : r) v = draw(rng, ranges.r);
  return AssortInstance(p, std::move(w), std::move(r), K, kArrivalSumFileTol);
}

Instance gen_example1_instance(std::size_t n, std::size_t m, double eps1) {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("eps1 in (0,1)");
  if (n < 2 || m < 1) throw std::invalid_argument("need N >= 2, M >= 1");
  Matrix y(n, m, eps1);
  for (std::size_t j = 0; j < m; ++j) y(0, j) = 1.0 - 1e-9;
  std::vector<double> r(n, 1.0);
  r[1] = 1.0 / (eps1 * eps1);
  return Instance(std::vector<double>(m, 1.0 / static_cast<double>(m)),
                  std::move(y), std::move(r), kArrivalSumFileTol);
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kOffline: return "offline";
    case Mode::kSimulate: return "simulate";
    case Mode::kAssort: return "assort";
    case Mode::kPofSweep: return "pof_sweep";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  if (s == "offline" || s == "solve") return Mode::kOffline;
  if (s == "simulate") return Mode::kSimulate;
  if (s == "assort") return Mode::kAssort;
  if (s == "pof_sweep" || s == "pof-sweep") return Mode::kPofSweep;
  throw ConfigError("unknown mode: " + s);
}

void ExperimentConfig::Validate() const {
  if (seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (T < 1) throw ConfigError("T must be >= 1");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (window && *window == 0) throw ConfigError("window must be >= 1");
  if (algorithm != "form") {
    try {
      parse_baseline_kind(algorithm);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (instance.kind == "file") {
    if (!fs::exists(instance.path)) {
      throw ConfigError("instance file not found: " + instance.path);
    }
  } else if (instance.kind != "synthetic" && instance.kind != "example1") {
    throw ConfigError("unknown instance source: " + instance.kind);
  }
  if (mode == Mode::kSimulate && K != 1) {
    throw ConfigError("simulate mode offers single items; use assort for K > 1");
  }
  if (!periodic_p.empty() && algorithm != "form") {
    throw ConfigError("periodic arrivals are supported for form runs only");
  }
  if ((window || window_auto) && mode != Mode::kSimulate) {
    throw ConfigError("window applies to simulate mode only");
  }
  if (window_auto && periodic_p.empty()) {
    throw ConfigError("automatic window needs a periodic arrival pattern");
  }
  for (double d : grid) {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("grid values must be in [0,1]");
  }
  try {
    outcome.Validate();
    // File instances are checked against their item count once loaded.
    if (instance.kind != "file") fairness.Validate(instance.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::optional<std::size_t> ExperimentConfig::ResolvedWindow() const {
  if (!window_auto) return window;
  const double w = static_cast<double>(periodic_p.size()) *
                   std::pow(static_cast<double>(T), 2.0 / 3.0);
  return static_cast<std::size_t>(std::ceil(w));
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Range range_or(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string(key) + " must have 2 entries");
  return Range{v[0], v[1]};
}

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  try {
    reject_unknown(j,
                   {"mode", "instance", "periodic", "algorithm", "T", "seeds",
                    "K", "outcome", "fairness", "window", "kappa", "grid",
                    "out_dir"},
                   "config");
    ExperimentConfig c;
    c.mode = parse_mode(get_or<std::string>(j, "mode", "simulate"));
    if (j.contains("instance")) {
      const json& ji = j.at("instance");
      reject_unknown(ji,
                     {"source", "path", "seed", "N", "M", "eps1", "r_range",
                      "y_range", "p_range", "w_range"},
                     "instance");
      c.instance.kind = get_or<std::string>(ji, "source", "synthetic");
      c.instance.path = get_or<std::string>(ji, "path", "");
      c.instance.seed = get_or<std::uint64_t>(ji, "seed", 0);
      c.instance.n = get_or<std::size_t>(ji, "N", 5);
      c.instance.m = get_or<std::size_t>(ji, "M", 3);
      c.instance.eps1 = get_or<double>(ji, "eps1", 0.1);
      auto& rg = c.instance.ranges;
      rg.r = range_or(ji, "r_range", rg.r);
      rg.y = range_or(ji, "y_range", rg.y);
      rg.p = range_or(ji, "p_range", rg.p);
      rg.w = range_or(ji, "w_range", rg.w);
    }
    if (j.contains("periodic")) {
      c.periodic_p = j.at("periodic").get<std::vector<std::vector<double>>>();
    }
    c.algorithm = get_or<std::string>(j, "algorithm", "form");
    c.T = get_or<std::size_t>(j, "T", 1000);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.K = get_or<std::size_t>(j, "K", 1);
    if (j.contains("outcome")) {
      const json& jo = j.at("outcome");
      reject_unknown(jo, {"item", "user_model", "user_param"}, "outcome");
      c.outcome.item_kind =
          parse_item_outcome(get_or<std::string>(jo, "item", "visibility"));
      c.outcome.user_model =
          parse_user_model(get_or<std::string>(jo, "user_model", "raw_y"));
      c.outcome.user_param = get_or<double>(jo, "user_param", 1.0);
    }
    if (j.contains("fairness")) {
      const json& jf = j.at("fairness");
      reject_unknown(jf,
                     {"delta_item", "delta_user", "swf", "hw_delta",
                      "parity_group"},
                     "fairness");
      c.fairness.delta_item = get_or<double>(jf, "delta_item", 0.0);
      c.fairness.delta_user = get_or<double>(jf, "delta_user", 0.0);
      c.fairness.swf = parse_swf_kind(get_or<std::string>(jf, "swf", "maxmin"));
      c.fairness.hw_delta = get_or<double>(jf, "hw_delta", 1.0);
      if (jf.contains("parity_group")) {
        c.fairness.parity_group =
            jf.at("parity_group").get<std::vector<std::size_t>>();
      }
    }
    if (j.contains("window")) {
      const json& jw = j.at("window");
      if (jw.is_string()) {
        if (jw.get<std::string>() != "auto") {
          throw ConfigError("window must be a number or \"auto\"");
        }
        c.window_auto = true;
      } else if (!jw.is_null()) {
        c.window = jw.get<std::size_t>();
      }
    }
    c.kappa = get_or<double>(j, "kappa", 1.0);
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
    c.out_dir = get_or<std::string>(j, "out_dir", "out");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json ji = {{"source", c.instance.kind},
             {"seed", c.instance.seed},
             {"N", c.instance.n},
             {"M", c.instance.m},
             {"eps1", c.instance.eps1},
             {"r_range", {c.instance.ranges.r.lo, c.instance.ranges.r.hi}},
             {"y_range", {c.instance.ranges.y.lo, c.instance.ranges.y.hi}},
             {"p_range", {c.instance.ranges.p.lo, c.instance.ranges.p.hi}},
             {"w_range", {c.instance.ranges.w.lo, c.instance.ranges.w.hi}}};
  if (!c.instance.path.empty()) ji["path"] = c.instance.path;
  json j = {{"mode", to_string(c.mode)},
            {"instance", ji},
            {"algorithm", c.algorithm},
            {"T", c.T},
            {"seeds", c.seeds},
            {"K", c.K},
            {"outcome",
             {{"item", to_string(c.outcome.item_kind)},
              {"user_model", to_string(c.outcome.user_model)},
              {"user_param", c.outcome.user_param}}},
            {"fairness",
             {{"delta_item", c.fairness.delta_item},
              {"delta_user", c.fairness.delta_user},
              {"swf", to_string(c.fairness.swf)},
              {"hw_delta", c.fairness.hw_delta},
              {"parity_group", c.fairness.parity_group}}},
            {"kappa", c.kappa},
            {"grid", c.grid},
            {"out_dir", c.out_dir}};
  if (!c.periodic_p.empty()) j["periodic"] = c.periodic_p;
  if (c.window_auto) {
    j["window"] = "auto";
  } else if (c.window) {
    j["window"] = *c.window;
  }
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return config_from_json(j);
}

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance file: ") + e.what());
  }
}

Matrix matrix_from_json(const json& j) {
  return Matrix::FromRows(j.get<std::vector<std::vector<double>>>());
}

}  // namespace

Instance instance_from_json(const json& j) {
  try {
    return Instance(j.at("p").get<std::vector<double>>(),
                    matrix_from_json(j.at("y")),
                    j.at("r").get<std::vector<double>>(), kArrivalSumFileTol);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
}

AssortInstance assort_instance_from_json(const json& j, std::size_t default_k) {
  try {
    return AssortInstance(j.at("p").get<std::vector<double>>(),
                          matrix_from_json(j.at("w")),
                          j.at("r").get<std::vector<double>>(),
                          get_or<std::size_t>(j, "K", default_k),
                          kArrivalSumFileTol);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
}

Instance load_instance(const ExperimentConfig& cfg) {
  const InstanceSource& s = cfg.instance;
  if (s.kind == "file") return instance_from_json(read_json_file(s.path));
  if (s.kind == "example1") return gen_example1_instance(s.n, s.m, s.eps1);
  return gen_synthetic_instance(s.seed, s.n, s.m, s.ranges);
}

AssortInstance load_assort_instance(const ExperimentConfig& cfg) {
  const InstanceSource& s = cfg.instance;
  if (s.kind == "file") {
    return assort_instance_from_json(read_json_file(s.path), cfg.K);
  }
  if (s.kind == "example1") {
    throw ConfigError("example1 has no assortment form");
  }
  return gen_synthetic_assort_instance(s.seed, s.n, s.m, cfg.K, s.ranges);
}

std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<AggregateRow> aggregate_trajectories(
    const std::vector<std::vector<std::vector<double>>>& per_seed) {
  std::vector<AggregateRow> rows;
  if (per_seed.empty()) return rows;
  const std::size_t n_cols = per_seed.front().size();
  std::size_t T = per_seed.front().front().size();
  for (const auto& s : per_seed) T = std::min(T, s.front().size());
  const double n = static_cast<double>(per_seed.size());
  rows.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    AggregateRow row;
    row.t = t + 1;
    for (std::size_t c = 0; c < n_cols; ++c) {
      double mean = 0.0;
      for (const auto& s : per_seed) mean += s[c][t];
      mean /= n;
      double var = 0.0;
      for (const auto& s : per_seed) var += (s[c][t] - mean) * (s[c][t] - mean);
      const double sd = per_seed.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      row.stats.emplace_back(mean, sd / std::sqrt(n));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>
read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  if (std::getline(in, line)) header = split(line);
  while (std::getline(in, line)) rows.push_back(split(line));
  return {header, rows};
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

// Columns of kAggregateColumns extracted from a trajectory.
std::vector<std::vector<double>> aggregate_columns(const SimTrajectory& traj) {
  std::vector<std::vector<double>> cols(kAggregateColumns.size());
  double sum = 0.0;
  for (const RoundRecord& r : traj.rounds) {
    sum += r.rev_inst;
    cols[0].push_back(r.rev_inst);
    cols[1].push_back(r.item_violation_max);
    cols[2].push_back(r.user_violation_max);
    cols[3].push_back(r.fallback ? 1.0 : 0.0);
    cols[4].push_back(sum / static_cast<double>(r.t));
  }
  return cols;
}

template <typename Fn>
std::vector<SimTrajectory> run_seeds(const std::vector<std::uint64_t>& seeds,
                                     Fn&& fn) {
  std::vector<SimTrajectory> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        out[k] = fn(seeds[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  // Report the failure of the lowest seed index for determinism.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void write_mean_se(std::ostream& os, double mean, double se) {
  os << ',' << format_double(mean) << ',' << format_double(se);
}

void write_simulation(const ExperimentConfig& cfg,
                      const std::vector<SimTrajectory>& trajs, double rev_star,
                      RunSummary& summary, json& manifest) {
  const fs::path dir(cfg.out_dir);
  std::vector<std::vector<std::vector<double>>> cols;
  std::vector<std::vector<double>> rev_curves, fair_curves;
  json files = json::array();
  for (const SimTrajectory& traj : trajs) {
    const fs::path p = dir / ("trajectory_seed" + std::to_string(traj.seed) + ".csv");
    auto out = open_out(p);
    write_trajectory_csv(out, traj);
    summary.files.push_back(p);
    files.push_back(p.filename().string());
    cols.push_back(aggregate_columns(traj));
    rev_curves.push_back(revenue_regret_curve(traj, rev_star));
    fair_curves.push_back(fairness_regret_curve(traj));
  }

  const auto agg = aggregate_trajectories(cols);
  {
    const fs::path p = dir / "aggregate.csv";
    auto out = open_out(p);
    out << 't';
    for (const auto& c : kAggregateColumns) out << ',' << c << "_mean," << c << "_se";
    out << '\n';
    for (const auto& row : agg) {
      out << row.t;
      for (const auto& [mean, se] : row.stats) write_mean_se(out, mean, se);
      out << '\n';
    }
    summary.files.push_back(p);
    files.push_back(p.filename().string());
  }
  {
    std::vector<std::vector<std::vector<double>>> curves;
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      curves.push_back({rev_curves[k], fair_curves[k]});
    }
    const auto rows = aggregate_trajectories(curves);
    const fs::path p = dir / "regret_curves.csv";
    auto out = open_out(p);
    out << "t,revenue_regret_mean,revenue_regret_se,fairness_regret_mean,"
           "fairness_regret_se\n";
    for (const auto& row : rows) {
      out << row.t;
      for (const auto& [mean, se] : row.stats) write_mean_se(out, mean, se);
      out << '\n';
    }
    summary.files.push_back(p);
    files.push_back(p.filename().string());
  }
  manifest["benchmark_revenue"] = rev_star;
  manifest["files"] = files;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  RunSummary summary;
  json manifest = {{"version", kVersion},
                   {"config", config_to_json(cfg)},
                   {"kappa", cfg.kappa}};

  switch (cfg.mode) {
    case Mode::kOffline: {
      const Instance theta = load_instance(cfg);
      const OptRev opt = opt_rev(theta);
      summary.opt_rev = opt.value;
      const FairSolveResult fair = solve_fair(theta, cfg.outcome, cfg.fairness);
      json result = {{"opt_rev", opt.value}, {"status", to_string(fair.status)}};
      if (fair.status != LpStatus::kOptimal) {
        summary.infeasible = true;
        result["pof"] = "infeasible";
      } else {
        summary.fair_rev = fair.fair_rev;
        summary.pof = price_of_fairness(theta, cfg.outcome, cfg.fairness);
        result["fair_rev"] = fair.fair_rev;
        result["pof"] = *summary.pof;
        const std::size_t rows = theta.num_items() + 3 * theta.num_types();
        if (rows <= kHoffmanRowCap) {
          summary.pof_bound = pof_upper_bound(theta, cfg.outcome, cfg.fairness);
          result["pof_upper_bound"] = *summary.pof_bound;
        }
        const fs::path p = dir / "policy.csv";
        auto out = open_out(p);
        out << "item";
        for (std::size_t j = 0; j < theta.num_types(); ++j) out << ",type" << j;
        out << '\n';
        for (std::size_t i = 0; i < theta.num_items(); ++i) {
          out << i;
          for (std::size_t j = 0; j < theta.num_types(); ++j) {
            out << ',' << format_double(fair.policy(i, j));
          }
          out << '\n';
        }
        summary.files.push_back(p);
      }
      const fs::path p = dir / "solve.json";
      open_out(p) << result.dump(2) << '\n';
      summary.files.push_back(p);
      manifest["result"] = result;
      break;
    }
    case Mode::kPofSweep: {
      const Instance theta = load_instance(cfg);
      const fs::path p = dir / "pof_grid.csv";
      auto out = open_out(p);
      out << "delta_item,delta_user,fair_rev,pof\n";
      const double opt = opt_rev(theta).value;
      for (double di : cfg.grid) {
        for (double du : cfg.grid) {
          FairnessConfig fc = cfg.fairness;
          fc.delta_item = di;
          fc.delta_user = du;
          const FairSolveResult fair = solve_fair(theta, cfg.outcome, fc);
          out << format_double(di) << ',' << format_double(du) << ',';
          if (fair.status != LpStatus::kOptimal) {
            out << "infeasible,infeasible\n";
          } else {
            const double pof = std::clamp((opt - fair.fair_rev) / opt, 0.0, 1.0);
            out << format_double(fair.fair_rev) << ',' << format_double(pof)
                << '\n';
          }
        }
      }
      summary.files.push_back(p);
      manifest["opt_rev"] = opt;
      break;
    }
    case Mode::kSimulate: {
      const Instance theta = load_instance(cfg);
      FormOptions opts;
      opts.kappa = cfg.kappa;
      opts.window = cfg.ResolvedWindow();
      opts.periodic_p = cfg.periodic_p;
      const Instance theta_metric = metric_instance(theta, opts, cfg.T);
      const FairSolveResult bench =
          solve_fair(theta_metric, cfg.outcome, cfg.fairness);
      if (bench.status != LpStatus::kOptimal) throw InfeasibleFair();
      std::vector<SimTrajectory> trajs;
      if (cfg.algorithm == "form") {
        trajs = run_seeds(cfg.seeds, [&](std::uint64_t s) {
          return run_form(theta, cfg.outcome, cfg.fairness, cfg.T, s, opts);
        });
      } else {
        const BaselineKind kind = parse_baseline_kind(cfg.algorithm);
        trajs = run_seeds(cfg.seeds, [&](std::uint64_t s) {
          return run_baseline(kind, theta, cfg.outcome, cfg.fairness, cfg.T, s);
        });
      }
      if (opts.window) manifest["window"] = *opts.window;
      write_simulation(cfg, trajs, bench.fair_rev, summary, manifest);
      break;
    }
    case Mode::kAssort: {
      const AssortInstance theta = load_assort_instance(cfg);
      FormOptions opts;
      opts.kappa = cfg.kappa;
      opts.periodic_p = cfg.periodic_p;
      const AssortInstance theta_metric =
          cfg.periodic_p.empty()
              ? theta
              : AssortInstance(ArrivalProcess(cfg.periodic_p).time_average(cfg.T),
                               theta.w(), theta.r(), theta.K(),
                               kArrivalSumFileTol);
      const AssortSolveResult bench =
          solve_fair_assort(theta_metric, cfg.outcome, cfg.fairness, 0.0);
      if (bench.status != LpStatus::kOptimal) throw InfeasibleFair();
      std::vector<SimTrajectory> trajs;
      if (cfg.algorithm == "form") {
        trajs = run_seeds(cfg.seeds, [&](std::uint64_t s) {
          return run_form_assort(theta, cfg.outcome, cfg.fairness, cfg.T, s,
                                 opts);
        });
      } else {
        const BaselineKind kind = parse_baseline_kind(cfg.algorithm);
        trajs = run_seeds(cfg.seeds, [&](std::uint64_t s) {
          return run_baseline_assort(kind, theta, cfg.outcome, cfg.fairness,
                                     cfg.T, s);
        });
      }
      write_simulation(cfg, trajs, bench.revenue, summary, manifest);
      break;
    }
  }

  const fs::path p = dir / "manifest.json";
  open_out(p) << manifest.dump(2) << '\n';
  summary.files.push_back(p);
  return summary;
}

}  // namespace fairrec

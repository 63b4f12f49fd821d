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

// Command-line front end: solve, simulate, assort, pof-sweep, validate.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible fair problem,
// 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fairrec/fair_opt.h"
#include "fairrec/harness.h"
#include "fairrec/lp.h"
#include "fairrec/online_form.h"

namespace {

using fairrec::ExperimentConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

struct Overrides {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> T;
  std::optional<std::size_t> K;
  std::optional<std::string> algorithm;
  std::optional<double> kappa;
  std::optional<std::size_t> window;
  std::optional<double> delta_item;
  std::optional<double> delta_user;
  std::optional<std::string> swf;
  std::optional<double> hw_delta;
  std::optional<std::string> item_outcome;
  std::optional<std::string> user_model;
  std::optional<double> user_param;
  std::optional<std::string> instance_file;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::uint64_t> instance_seed;
};

void add_common(CLI::App* cmd, Overrides& o, bool simulation) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  auto* out = cmd->add_option("--out", o.out, "Output directory");
  auto* seed = cmd->add_option("--seed", o.seeds, "Seed list")->delimiter(',');
  if (simulation) {
    out->required();
    seed->required();
  }
  cmd->add_option("--instance", o.instance_file, "Instance JSON file");
  cmd->add_option("--N", o.n, "Items for generated instances");
  cmd->add_option("--M", o.m, "User types for generated instances");
  cmd->add_option("--instance-seed", o.instance_seed, "Generator seed");
  cmd->add_option("--delta-item", o.delta_item, "Item fairness level");
  cmd->add_option("--delta-user", o.delta_user, "User fairness level");
  cmd->add_option("--swf", o.swf,
                  "maxmin | ks | hooker_williams | "
                  "demographic_parity");
  cmd->add_option("--hw-delta", o.hw_delta, "Hooker-Williams threshold");
  cmd->add_option("--item-outcome", o.item_outcome,
                  "visibility | marketshare | expected_revenue");
  cmd->add_option("--user-model", o.user_model,
                  "mnl | probit | valuation_exp | raw_y");
  cmd->add_option("--user-param", o.user_param, "Probit sigma or lambda");
  if (simulation) {
    cmd->add_option("--T", o.T, "Horizon");
    cmd->add_option("--K", o.K, "Assortment size");
    cmd->add_option("--algorithm", o.algorithm,
                    "form | greedy | max_utility | min_revenue | random");
    cmd->add_option("--kappa", o.kappa, "Schedule scale");
    cmd->add_option("--window", o.window, "Sliding window for arrival rates");
  }
}

ExperimentConfig build_config(const Overrides& o, fairrec::Mode mode) {
  ExperimentConfig c;
  if (!o.config.empty()) c = fairrec::load_config(o.config);
  c.mode = mode;
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.T) c.T = *o.T;
  if (o.K) c.K = *o.K;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (o.kappa) c.kappa = *o.kappa;
  if (o.window) c.window = *o.window;
  if (o.delta_item) c.fairness.delta_item = *o.delta_item;
  if (o.delta_user) c.fairness.delta_user = *o.delta_user;
  if (o.hw_delta) c.fairness.hw_delta = *o.hw_delta;
  try {
    if (o.swf) c.fairness.swf = fairrec::parse_swf_kind(*o.swf);
    if (o.item_outcome) {
      c.outcome.item_kind = fairrec::parse_item_outcome(*o.item_outcome);
    }
    if (o.user_model) c.outcome.user_model = fairrec::parse_user_model(*o.user_model);
  } catch (const std::invalid_argument& e) {
    throw fairrec::ConfigError(e.what());
  }
  if (o.user_param) c.outcome.user_param = *o.user_param;
  if (o.instance_file) {
    c.instance.kind = "file";
    c.instance.path = *o.instance_file;
  }
  if (o.n) c.instance.n = *o.n;
  if (o.m) c.instance.m = *o.m;
  if (o.instance_seed) c.instance.seed = *o.instance_seed;
  return c;
}

int report_error(const std::string& kind, const std::string& message,
                 const std::string& out_dir, int code) {
  const json record = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << record.dump() << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream(std::filesystem::path(out_dir) / "error.json")
        << record.dump(2) << '\n';
  }
  return code;
}

int run(const Overrides& o, fairrec::Mode mode) {
  std::string out_dir = o.out;
  try {
    const ExperimentConfig cfg = build_config(o, mode);
    out_dir = cfg.out_dir;
    const fairrec::RunSummary s = fairrec::run_experiment(cfg);
    if (mode == fairrec::Mode::kOffline) {
      json line = {{"opt_rev", *s.opt_rev}};
      if (s.infeasible) {
        line["status"] = "infeasible";
        std::cout << line.dump() << '\n';
        return kExitInfeasible;
      }
      line["fair_rev"] = *s.fair_rev;
      line["pof"] = *s.pof;
      if (s.pof_bound) line["pof_upper_bound"] = *s.pof_bound;
      std::cout << line.dump() << '\n';
    } else {
      for (const auto& f : s.files) std::cout << f.string() << '\n';
    }
    return kExitOk;
  } catch (const fairrec::ConfigError& e) {
    return report_error("config", e.what(), out_dir, kExitConfig);
  } catch (const fairrec::InvalidInstance& e) {
    return report_error("invalid_instance", e.what(), out_dir, kExitConfig);
  } catch (const fairrec::InfeasibleFair& e) {
    return report_error("infeasible", e.what(), out_dir, kExitInfeasible);
  } catch (const fairrec::NumericalError& e) {
    return report_error("numeric", e.what(), out_dir, kExitNumeric);
  } catch (const fairrec::SolverFailure& e) {
    return report_error("numeric", e.what(), out_dir, kExitNumeric);
  } catch (const std::invalid_argument& e) {
    return report_error("config", e.what(), out_dir, kExitConfig);
  } catch (const std::length_error& e) {
    return report_error("config", e.what(), out_dir, kExitConfig);
  }
}

int validate(const Overrides& o) {
  try {
    const ExperimentConfig cfg = build_config(o, fairrec::Mode::kOffline);
    cfg.Validate();
    const fairrec::Instance theta = fairrec::load_instance(cfg);
    cfg.fairness.Validate(theta.num_items());
    std::cout << json{{"valid", true},
                      {"N", theta.num_items()},
                      {"M", theta.num_types()}}
                     .dump()
              << '\n';
    return kExitOk;
  } catch (const fairrec::InvalidInstance& e) {
    std::cout << json{{"valid", false}, {"violations", e.violations()}}.dump()
              << '\n';
    return kExitConfig;
  } catch (const fairrec::ConfigError& e) {
    return report_error("config", e.what(), "", kExitConfig);
  } catch (const std::invalid_argument& e) {
    return report_error("config", e.what(), "", kExitConfig);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-constrained recommendation: offline solves, online "
               "simulation and sweeps"};
  app.require_subcommand(1);

  Overrides solve_o, sim_o, assort_o, sweep_o, validate_o;
  auto* solve = app.add_subcommand("solve", "Offline fair solve and price of fairness");
  add_common(solve, solve_o, false);
  auto* simulate = app.add_subcommand("simulate", "Online simulation (FORM or baseline)");
  add_common(simulate, sim_o, true);
  auto* assort = app.add_subcommand("assort", "Online assortment simulation");
  add_common(assort, assort_o, true);
  auto* sweep = app.add_subcommand("pof-sweep", "Price of fairness over a delta grid");
  add_common(sweep, sweep_o, false);
  auto* check = app.add_subcommand("validate", "Validate a config and its instance");
  add_common(check, validate_o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*solve) return run(solve_o, fairrec::Mode::kOffline);
  if (*simulate) return run(sim_o, fairrec::Mode::kSimulate);
  if (*assort) return run(assort_o, fairrec::Mode::kAssort);
  if (*sweep) return run(sweep_o, fairrec::Mode::kPofSweep);
  return validate(validate_o);
}

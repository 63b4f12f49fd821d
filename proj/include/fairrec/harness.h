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

// Experiment plumbing: instance generators, JSON configuration, seeded
// multi-run orchestration and CSV/manifest emission.

#ifndef FAIRREC_HARNESS_H_
#define FAIRREC_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fairrec/assortment.h"
#include "fairrec/instance.h"

namespace fairrec {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kWorkersEnv = "FAIRREC_WORKERS";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct SyntheticRanges {
  Range r{0.5, 1.5};
  Range y{0.05, 0.95};
  Range p{0.2, 1.0};  // unnormalized draws, then normalized
  Range w{0.1, 2.0};  // MNL weights for assortment instances
};

Instance gen_synthetic_instance(std::uint64_t seed, std::size_t n,
                                std::size_t m,
                                const SyntheticRanges& ranges = {});
AssortInstance gen_synthetic_assort_instance(std::uint64_t seed, std::size_t n,
                                             std::size_t m, std::size_t K,
                                             const SyntheticRanges& ranges = {});

// y_1j = 1 - 1e-9 (kept inside the open interval), other y = eps1,
// p uniform, r_2 = 1 / eps1^2 and other r = 1.
Instance gen_example1_instance(std::size_t n, std::size_t m, double eps1);

enum class Mode { kOffline, kSimulate, kAssort, kPofSweep };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct InstanceSource {
  std::string kind = "synthetic";  // synthetic | file | example1
  std::string path;
  std::uint64_t seed = 0;
  std::size_t n = 5;
  std::size_t m = 3;
  double eps1 = 0.1;
  SyntheticRanges ranges;
};

struct ExperimentConfig {
  Mode mode = Mode::kSimulate;
  InstanceSource instance;
  std::vector<std::vector<double>> periodic_p;  // empty: stationary arrivals
  std::string algorithm = "form";  // form or a baseline kind
  std::size_t T = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::size_t K = 1;
  OutcomeSpec outcome;
  FairnessConfig fairness;
  std::optional<std::size_t> window;
  bool window_auto = false;  // window = Q * T^(2/3)
  double kappa = 1.0;
  std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::string out_dir = "out";

  // Throws ConfigError describing the first problem found.
  void Validate() const;
  std::optional<std::size_t> ResolvedWindow() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

Instance load_instance(const ExperimentConfig& cfg);
AssortInstance load_assort_instance(const ExperimentConfig& cfg);
Instance instance_from_json(const nlohmann::json& j);
AssortInstance assort_instance_from_json(const nlohmann::json& j,
                                         std::size_t default_k);

// Worker count: FAIRREC_WORKERS if set and positive, else hardware threads.
std::size_t worker_count();

struct RunSummary {
  std::vector<std::filesystem::path> files;
  // Offline mode.
  std::optional<double> opt_rev;
  std::optional<double> fair_rev;
  std::optional<double> pof;
  std::optional<double> pof_bound;
  bool infeasible = false;
};

// Writes all artifacts under cfg.out_dir. Errors propagate as exceptions;
// the CLI maps them to exit codes.
RunSummary run_experiment(const ExperimentConfig& cfg);

// Column means and standard errors per round across trajectory files, as
// written to aggregate.csv. Exposed so tests can recompute it.
struct AggregateRow {
  std::size_t t = 0;
  std::vector<std::pair<double, double>> stats;  // (mean, std / sqrt(n))
};
inline const std::vector<std::string> kAggregateColumns = {
    "rev_inst", "item_violation_max", "user_violation_max", "fallback",
    "avg_rev"};
std::vector<AggregateRow> aggregate_trajectories(
    const std::vector<std::vector<std::vector<double>>>& per_seed_columns);

// Reads a CSV file into a header and rows of raw fields.
std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>
read_csv(const std::filesystem::path& path);

}  // namespace fairrec

#endif  // FAIRREC_HARNESS_H_

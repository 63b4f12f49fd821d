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

// Online fair recommendation: exploration and relaxation schedules,
// inverse-propensity estimators, the per-round relaxed solve, and regret
// metrics measured against the true instance.

#ifndef FAIRREC_ONLINE_FORM_H_
#define FAIRREC_ONLINE_FORM_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrec/fair_opt.h"
#include "fairrec/instance.h"
#include "fairrec/lp.h"
#include "fairrec/matrix.h"
#include "fairrec/rng.h"

namespace fairrec {

double epsilon_t(std::size_t n, std::size_t t);

struct ScheduleValues {
  double gamma_y = 0.0;
  double gamma_p = 0.0;
  double eta = 0.0;
  double m = 1.0;
};

// Unscaled confidence radii over the full history. Uses epsilon_t with the
// given action count n for gamma_y.
ScheduleValues schedule_values(std::size_t T, std::size_t n, std::size_t m_types,
                               std::size_t t);

class Schedules {
 public:
  // n_actions is N for single-item offers and the assortment count for
  // assortment offers. kappa scales both radii and hence eta. With a window,
  // gamma_p uses the window length instead of t.
  Schedules(std::size_t T, std::size_t n_actions, std::size_t m_types,
            double kappa = 1.0, std::optional<std::size_t> window = {});

  double epsilon(std::size_t t) const;
  ScheduleValues at(std::size_t t) const;
  double eta(std::size_t t) const { return at(t).eta; }

  // First round t at which m(t) > 1, gamma_y < 1 - y_max and
  // max(gamma_y, gamma_p) <= zeta; nullopt if none within the horizon.
  std::optional<std::size_t> cutoff(double y_max, double zeta) const;

  std::size_t horizon() const { return T_; }
  double kappa() const { return kappa_; }
  std::optional<std::size_t> window() const { return window_; }

 private:
  std::size_t T_;
  std::size_t n_;
  std::size_t m_;
  double kappa_;
  std::optional<std::size_t> window_;
  double log_T_;
};

// Running IPW purchase estimates and empirical arrival frequencies.
class EstimatorState {
 public:
  // With prior_until_offered, a pair keeps the initial 1/2 until it has been
  // offered at least once; otherwise the IPW mean applies from the first
  // arrival of its type.
  EstimatorState(std::size_t n, std::size_t m,
                 std::optional<std::size_t> window = {},
                 bool prior_until_offered = false);

  // offer_prob is the probability with which `item` was offered to `type`.
  void Update(std::size_t type, std::size_t item, bool purchase,
              double offer_prob);

  std::size_t t() const { return t_; }
  const Matrix& y_hat() const { return y_hat_; }
  const std::vector<double>& p_hat() const { return p_hat_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  Instance Estimate(const std::vector<double>& r) const;
  // FNV-1a over the bytes of the current estimates.
  std::uint64_t Hash() const;

 private:
  void RefreshArrivals();

  std::size_t n_, m_;
  std::size_t t_ = 0;
  Matrix ipw_sum_;
  Matrix y_hat_;
  std::vector<std::vector<bool>> offered_;
  bool prior_until_offered_;
  std::vector<std::size_t> counts_;
  std::optional<std::size_t> window_;
  std::deque<std::size_t> recent_;
  std::vector<std::size_t> window_counts_;
  std::vector<double> p_hat_;
};

void update_estimates(EstimatorState& state, std::size_t type,
                      std::size_t item, bool purchase, const Policy& x);

bool good_event_holds(const Matrix& y_hat, const std::vector<double>& p_hat,
                      const Instance& theta, std::size_t t, std::size_t T);

// Arrival distribution per round: fixed p, or a periodic list p_t =
// pattern[(t - 1) mod Q].
class ArrivalProcess {
 public:
  explicit ArrivalProcess(std::vector<double> p);
  explicit ArrivalProcess(std::vector<std::vector<double>> pattern);

  const std::vector<double>& at(std::size_t t) const;
  // (1/T) sum_t p_t.
  std::vector<double> time_average(std::size_t T) const;
  std::size_t num_types() const { return pattern_.front().size(); }

 private:
  std::vector<std::vector<double>> pattern_;
};

struct FormDecision {
  Policy x;
  bool fallback = false;
  LpStatus relax_status = LpStatus::kOptimal;
  double eta = 0.0;
  double eps = 0.0;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::size_t round, const std::string& what);
  std::size_t round() const { return round_; }

 private:
  std::size_t round_;
};

// Policy for round t from the current estimates: relaxed solve plus uniform
// exploration, or uniform fallback.
FormDecision form_decide(const EstimatorState& state, const Schedules& sched,
                         std::size_t t, const std::vector<double>& r,
                         const OutcomeSpec& spec, const FairnessConfig& cfg);

struct RoundResult {
  FormDecision decision;
  std::size_t item = 0;
  bool purchase = false;
};

// One full round against the environment y_true for an arriving type.
RoundResult form_round(EstimatorState& state, const Schedules& sched,
                       std::size_t t, const Instance& theta_true,
                       const OutcomeSpec& spec, const FairnessConfig& cfg,
                       std::size_t arrival, RngStreams& rng);

struct RoundRecord {
  std::size_t t = 0;
  std::size_t arrival = 0;
  // Offered item (single-item) or chosen item, -1 for none (assortment).
  long item = 0;
  bool purchase = false;
  double rev_inst = 0.0;
  double item_violation_max = 0.0;
  double user_violation_max = 0.0;
  bool fallback = false;
  double eta = 0.0;
  double eps = 0.0;
  std::uint64_t estimate_hash = 0;
  LpStatus relax_status = LpStatus::kOptimal;
  std::vector<std::size_t> offered_set;  // assortment runs only
};

struct SimTrajectory {
  std::uint64_t seed = 0;
  std::string algorithm;
  double kappa = 1.0;
  bool assortment = false;
  std::vector<RoundRecord> rounds;
  std::vector<Policy> policies;  // single-item runs
  // True-instance stakeholder outcomes of each round's policy.
  std::vector<std::vector<double>> item_outcomes;
  std::vector<std::vector<double>> user_outcomes;
  // Right-hand sides delta * O(f) under the true instance.
  std::vector<double> item_rhs;
  std::vector<double> user_rhs;
  // Realized revenue per item, summed over rounds.
  std::vector<double> realized_item_revenue;
};

struct FormOptions {
  double kappa = 1.0;
  std::optional<std::size_t> window;
  // Periodic arrival pattern; empty means draw from theta_true.p().
  std::vector<std::vector<double>> periodic_p;
};

// Instance used for metrics: theta_true with p replaced by the time average
// of the arrival process when periodic.
Instance metric_instance(const Instance& theta_true, const FormOptions& opts,
                         std::size_t T);

SimTrajectory run_form(const Instance& theta_true, const OutcomeSpec& spec,
                       const FairnessConfig& cfg, std::size_t T,
                       std::uint64_t seed, const FormOptions& opts = {});

// Fills the per-round metrics of a record and appends the outcome vectors.
void record_policy_metrics(SimTrajectory& traj, RoundRecord& rec,
                           const Policy& x, const Instance& theta,
                           const FairTargets& targets);

double revenue_regret(const SimTrajectory& traj, const Instance& theta,
                      const Policy& x_star);
double fairness_regret(const SimTrajectory& traj, const Instance& theta,
                       const OutcomeSpec& spec, const Policy& f_item,
                       const Policy& f_user, const FairnessConfig& cfg);
// Same metric from the recorded outcome vectors and right-hand sides.
double fairness_regret(const SimTrajectory& traj);

// R(t) for t = 1..T given the benchmark revenue.
std::vector<double> revenue_regret_curve(const SimTrajectory& traj,
                                         double rev_star);
std::vector<double> fairness_regret_curve(const SimTrajectory& traj);

void write_trajectory_csv(std::ostream& os, const SimTrajectory& traj);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace fairrec

#endif  // FAIRREC_ONLINE_FORM_H_

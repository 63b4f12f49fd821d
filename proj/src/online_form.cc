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

#include "fairrec/online_form.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

namespace fairrec {

double epsilon_t(std::size_t n, std::size_t t) {
  if (n == 0 || t == 0) throw std::invalid_argument("epsilon_t needs N, t >= 1");
  const double nd = static_cast<double>(n), td = static_cast<double>(t);
  return std::min(1.0 / nd, std::pow(nd, -2.0 / 3.0) * std::pow(td, -1.0 / 3.0));
}

namespace {

double m_of_t(double t, double log_T) {
  return std::max(1.0, t / log_T - std::sqrt(t * log_T / 2.0));
}

ScheduleValues compute_schedule(double log_T, double log_3T, std::size_t n,
                                std::size_t m_types, std::size_t t,
                                double kappa,
                                std::optional<std::size_t> window) {
  ScheduleValues v;
  const double td = static_cast<double>(t);
  v.m = m_of_t(td, log_T);
  v.gamma_y = kappa * 2.0 * log_T / std::sqrt(v.m * epsilon_t(n, t));
  if (window) {
    v.gamma_p = kappa * 5.0 * std::sqrt(log_3T) /
                std::sqrt(static_cast<double>(*window));
  } else {
    v.gamma_p = kappa * 5.0 * std::sqrt(log_3T / td);
  }
  v.eta = static_cast<double>(m_types) * log_T * std::max(v.gamma_y, v.gamma_p);
  return v;
}

}  // namespace

ScheduleValues schedule_values(std::size_t T, std::size_t n,
                               std::size_t m_types, std::size_t t) {
  if (T < 2 || t < 1 || t > T) {
    throw std::invalid_argument("schedule_values needs T >= 2, 1 <= t <= T");
  }
  const double Td = static_cast<double>(T);
  return compute_schedule(std::log(Td), std::log(3.0 * Td), n, m_types, t,
                          1.0, std::nullopt);
}

Schedules::Schedules(std::size_t T, std::size_t n_actions, std::size_t m_types,
                     double kappa, std::optional<std::size_t> window)
    : T_(T), n_(n_actions), m_(m_types), kappa_(kappa), window_(window) {
  if (T == 0 || n_actions == 0 || m_types == 0) {
    throw std::invalid_argument("schedules need T, N, M >= 1");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (window && *window == 0) throw std::invalid_argument("window must be >= 1");
  // Horizons below 2 make log T vanish; evaluate them as T = 2.
  log_T_ = std::log(static_cast<double>(std::max<std::size_t>(T, 2)));
}

double Schedules::epsilon(std::size_t t) const { return epsilon_t(n_, t); }

ScheduleValues Schedules::at(std::size_t t) const {
  const double Td = static_cast<double>(std::max<std::size_t>(T_, 2));
  return compute_schedule(log_T_, std::log(3.0 * Td), n_, m_, t, kappa_,
                          window_);
}

std::optional<std::size_t> Schedules::cutoff(double y_max, double zeta) const {
  for (std::size_t t = 1; t <= T_; ++t) {
    const ScheduleValues v = at(t);
    if (v.m > 1.0 && v.gamma_y < 1.0 - y_max &&
        std::max(v.gamma_y, v.gamma_p) <= zeta) {
      return t;
    }
  }
  return std::nullopt;
}

EstimatorState::EstimatorState(std::size_t n, std::size_t m,
                               std::optional<std::size_t> window,
                               bool prior_until_offered)
    : n_(n),
      m_(m),
      ipw_sum_(n, m, 0.0),
      y_hat_(n, m, 0.5),
      offered_(n, std::vector<bool>(m, false)),
      prior_until_offered_(prior_until_offered),
      counts_(m, 0),
      window_(window),
      window_counts_(m, 0),
      p_hat_(m, 1.0 / static_cast<double>(m)) {
  if (n == 0 || m == 0) throw std::invalid_argument("empty estimator");
  if (window && *window == 0) throw std::invalid_argument("window must be >= 1");
}

void EstimatorState::Update(std::size_t type, std::size_t item, bool purchase,
                            double offer_prob) {
  if (type >= m_ || item >= n_) throw std::out_of_range("estimator index");
  if (!(offer_prob > 0.0)) {
    throw std::invalid_argument("update with zero offer probability");
  }
  ++t_;
  ++counts_[type];
  offered_[item][type] = true;
  if (purchase) ipw_sum_(item, type) += 1.0 / offer_prob;
  const double nj = static_cast<double>(counts_[type]);
  for (std::size_t i = 0; i < n_; ++i) {
    if (prior_until_offered_ && !offered_[i][type]) continue;
    y_hat_(i, type) = ipw_sum_(i, type) / nj;
  }
  if (window_) {
    recent_.push_back(type);
    ++window_counts_[type];
    if (recent_.size() > *window_) {
      --window_counts_[recent_.front()];
      recent_.pop_front();
    }
  }
  RefreshArrivals();
}

void EstimatorState::RefreshArrivals() {
  const auto& c = window_ ? window_counts_ : counts_;
  const double total =
      static_cast<double>(window_ ? recent_.size() : t_);
  for (std::size_t j = 0; j < m_; ++j) {
    p_hat_[j] = static_cast<double>(c[j]) / total;
  }
}

Instance EstimatorState::Estimate(const std::vector<double>& r) const {
  return Instance::Estimated(p_hat_, y_hat_, r);
}

std::uint64_t EstimatorState::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (double v : y_hat_.data()) mix(v);
  for (double v : p_hat_) mix(v);
  return h;
}

void update_estimates(EstimatorState& state, std::size_t type,
                      std::size_t item, bool purchase, const Policy& x) {
  state.Update(type, item, purchase, x(item, type));
}

bool good_event_holds(const Matrix& y_hat, const std::vector<double>& p_hat,
                      const Instance& theta, std::size_t t, std::size_t T) {
  const ScheduleValues v =
      schedule_values(T, theta.num_items(), theta.num_types(), t);
  double p_dist = 0.0;
  for (std::size_t j = 0; j < theta.num_types(); ++j) {
    p_dist += std::abs(p_hat[j] - theta.p()[j]);
  }
  double y_dist = 0.0;
  for (std::size_t i = 0; i < theta.num_items(); ++i) {
    for (std::size_t j = 0; j < theta.num_types(); ++j) {
      y_dist = std::max(y_dist, std::abs(y_hat(i, j) - theta.y()(i, j)));
    }
  }
  return p_dist <= v.gamma_p && y_dist <= v.gamma_y;
}

ArrivalProcess::ArrivalProcess(std::vector<double> p) {
  pattern_.push_back(std::move(p));
}

ArrivalProcess::ArrivalProcess(std::vector<std::vector<double>> pattern)
    : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw std::invalid_argument("empty arrival pattern");
  for (const auto& p : pattern_) {
    if (p.size() != pattern_.front().size()) {
      throw std::invalid_argument("arrival pattern entries differ in length");
    }
    double s = 0.0;
    for (double v : p) {
      if (v < 0.0) throw std::invalid_argument("negative arrival probability");
      s += v;
    }
    if (std::abs(s - 1.0) > kArrivalSumFileTol) {
      throw std::invalid_argument("arrival pattern entry does not sum to 1");
    }
  }
}

const std::vector<double>& ArrivalProcess::at(std::size_t t) const {
  return pattern_[(t - 1) % pattern_.size()];
}

std::vector<double> ArrivalProcess::time_average(std::size_t T) const {
  const std::size_t q = pattern_.size();
  std::vector<double> avg(num_types(), 0.0);
  for (std::size_t k = 0; k < q; ++k) {
    const std::size_t count = T / q + (k < T % q ? 1 : 0);
    for (std::size_t j = 0; j < avg.size(); ++j) {
      avg[j] += static_cast<double>(count) * pattern_[k][j];
    }
  }
  for (double& v : avg) v /= static_cast<double>(T);
  return avg;
}

SolverFailure::SolverFailure(std::size_t round, const std::string& what)
    : std::runtime_error("solver failure at round " + std::to_string(round) +
                         ": " + what),
      round_(round) {}

FormDecision form_decide(const EstimatorState& state, const Schedules& sched,
                         std::size_t t, const std::vector<double>& r,
                         const OutcomeSpec& spec, const FairnessConfig& cfg) {
  const std::size_t n = r.size(), m = state.p_hat().size();
  FormDecision d;
  d.eps = sched.epsilon(t);
  d.eta = sched.eta(t);
  d.x = Policy::Uniform(n, m);

  const auto y_data = state.y_hat().data();
  if (*std::max_element(y_data.begin(), y_data.end()) >= 1.0) {
    d.fallback = true;
    return d;
  }
  const Instance theta_hat = state.Estimate(r);
  FairSolveResult res;
  try {
    res = solve_fair_targets(theta_hat, fair_targets(theta_hat, spec, cfg),
                             d.eta);
  } catch (const NumericalError& e) {
    throw SolverFailure(t, e.what());
  } catch (const std::domain_error&) {
    // Utility undefined at this estimate.
    res.status = LpStatus::kInfeasible;
  } catch (const std::invalid_argument&) {
    // Degenerate estimate, e.g. an item with zero attainable outcome.
    res.status = LpStatus::kInfeasible;
  }
  d.relax_status = res.status;
  if (res.status != LpStatus::kOptimal) {
    d.fallback = true;
    return d;
  }
  const double nd = static_cast<double>(n);
  Matrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      x(i, j) = (1.0 - nd * d.eps) * res.policy(i, j) + d.eps;
    }
  }
  d.x = Policy(std::move(x));
  return d;
}

RoundResult form_round(EstimatorState& state, const Schedules& sched,
                       std::size_t t, const Instance& theta_true,
                       const OutcomeSpec& spec, const FairnessConfig& cfg,
                       std::size_t arrival, RngStreams& rng) {
  RoundResult out;
  out.decision = form_decide(state, sched, t, theta_true.r(), spec, cfg);
  const std::vector<double> col = out.decision.x.matrix().col(arrival);
  out.item = rng.items.Categorical(col);
  out.purchase = rng.purchases.Bernoulli(theta_true.y()(out.item, arrival));
  update_estimates(state, arrival, out.item, out.purchase, out.decision.x);
  return out;
}

Instance metric_instance(const Instance& theta_true, const FormOptions& opts,
                         std::size_t T) {
  if (opts.periodic_p.empty()) return theta_true;
  const ArrivalProcess arrivals(opts.periodic_p);
  return Instance(arrivals.time_average(T), theta_true.y(), theta_true.r(),
                  kArrivalSumFileTol);
}

void record_policy_metrics(SimTrajectory& traj, RoundRecord& rec,
                           const Policy& x, const Instance& theta,
                           const FairTargets& targets) {
  rec.rev_inst = expected_revenue(x, theta);
  auto oi = item_outcomes(targets.L, x);
  auto ou = user_outcomes(targets.U, x);
  rec.item_violation_max = 0.0;
  rec.user_violation_max = 0.0;
  for (std::size_t i = 0; i < oi.size(); ++i) {
    rec.item_violation_max =
        std::max(rec.item_violation_max, targets.item_rhs[i] - oi[i]);
  }
  for (std::size_t j = 0; j < ou.size(); ++j) {
    rec.user_violation_max =
        std::max(rec.user_violation_max, targets.user_rhs[j] - ou[j]);
  }
  traj.item_outcomes.push_back(std::move(oi));
  traj.user_outcomes.push_back(std::move(ou));
}

SimTrajectory run_form(const Instance& theta_true, const OutcomeSpec& spec,
                       const FairnessConfig& cfg, std::size_t T,
                       std::uint64_t seed, const FormOptions& opts) {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  const std::size_t n = theta_true.num_items(), m = theta_true.num_types();
  const ArrivalProcess arrivals = opts.periodic_p.empty()
                                      ? ArrivalProcess(theta_true.p())
                                      : ArrivalProcess(opts.periodic_p);
  if (arrivals.num_types() != m) {
    throw std::invalid_argument("arrival pattern length differs from M");
  }
  const Instance theta_metric = metric_instance(theta_true, opts, T);
  const FairTargets targets = fair_targets(theta_metric, spec, cfg);
  const Schedules sched(T, n, m, opts.kappa, opts.window);

  SimTrajectory traj;
  traj.seed = seed;
  traj.algorithm = "form";
  traj.kappa = opts.kappa;
  traj.item_rhs = targets.item_rhs;
  traj.user_rhs = targets.user_rhs;
  traj.realized_item_revenue.assign(n, 0.0);
  traj.rounds.reserve(T);
  traj.policies.reserve(T);

  RngStreams rng(seed);
  EstimatorState state(n, m, opts.window);
  for (std::size_t t = 1; t <= T; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.estimate_hash = state.Hash();
    rec.arrival = rng.arrivals.Categorical(arrivals.at(t));
    const RoundResult rr =
        form_round(state, sched, t, theta_true, spec, cfg, rec.arrival, rng);
    rec.item = static_cast<long>(rr.item);
    rec.purchase = rr.purchase;
    rec.fallback = rr.decision.fallback;
    rec.relax_status = rr.decision.relax_status;
    rec.eta = rr.decision.eta;
    rec.eps = rr.decision.eps;
    if (rr.purchase) traj.realized_item_revenue[rr.item] += theta_true.r()[rr.item];
    record_policy_metrics(traj, rec, rr.decision.x, theta_metric, targets);
    traj.policies.push_back(rr.decision.x);
    traj.rounds.push_back(std::move(rec));
  }
  return traj;
}

double revenue_regret(const SimTrajectory& traj, const Instance& theta,
                      const Policy& x_star) {
  if (traj.policies.empty()) return 0.0;
  const double rev_star = expected_revenue(x_star, theta);
  double total = 0.0;
  for (const Policy& x : traj.policies) {
    total += rev_star - expected_revenue(x, theta);
  }
  return total / static_cast<double>(traj.policies.size());
}

namespace {

double worst_average_shortfall(const std::vector<std::vector<double>>& outcomes,
                               const std::vector<double>& rhs,
                               std::size_t rounds) {
  double worst = 0.0;
  for (std::size_t s = 0; s < rhs.size(); ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < rounds; ++t) sum += rhs[s] - outcomes[t][s];
    worst = std::max(worst, sum / static_cast<double>(rounds));
  }
  return worst;
}

}  // namespace

double fairness_regret(const SimTrajectory& traj, const Instance& theta,
                       const OutcomeSpec& spec, const Policy& f_item,
                       const Policy& f_user, const FairnessConfig& cfg) {
  const Matrix L = item_outcome_matrix(theta, spec);
  const Matrix U = user_outcome_matrix(theta, spec);
  auto item_rhs = item_outcomes(L, f_item);
  for (double& v : item_rhs) v *= cfg.delta_item;
  auto user_rhs = user_outcomes(U, f_user);
  for (double& v : user_rhs) v *= cfg.delta_user;
  std::vector<std::vector<double>> oi, ou;
  for (const Policy& x : traj.policies) {
    oi.push_back(item_outcomes(L, x));
    ou.push_back(user_outcomes(U, x));
  }
  if (oi.empty()) return 0.0;
  return std::max(worst_average_shortfall(oi, item_rhs, oi.size()),
                  worst_average_shortfall(ou, user_rhs, ou.size()));
}

double fairness_regret(const SimTrajectory& traj) {
  const std::size_t T = traj.item_outcomes.size();
  if (T == 0) return 0.0;
  return std::max(worst_average_shortfall(traj.item_outcomes, traj.item_rhs, T),
                  worst_average_shortfall(traj.user_outcomes, traj.user_rhs, T));
}

std::vector<double> revenue_regret_curve(const SimTrajectory& traj,
                                         double rev_star) {
  std::vector<double> curve;
  curve.reserve(traj.rounds.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < traj.rounds.size(); ++t) {
    sum += rev_star - traj.rounds[t].rev_inst;
    curve.push_back(sum / static_cast<double>(t + 1));
  }
  return curve;
}

std::vector<double> fairness_regret_curve(const SimTrajectory& traj) {
  std::vector<double> item_sum(traj.item_rhs.size(), 0.0);
  std::vector<double> user_sum(traj.user_rhs.size(), 0.0);
  std::vector<double> curve;
  curve.reserve(traj.item_outcomes.size());
  for (std::size_t t = 0; t < traj.item_outcomes.size(); ++t) {
    double worst = 0.0;
    for (std::size_t s = 0; s < item_sum.size(); ++s) {
      item_sum[s] += traj.item_rhs[s] - traj.item_outcomes[t][s];
      worst = std::max(worst, item_sum[s]);
    }
    for (std::size_t s = 0; s < user_sum.size(); ++s) {
      user_sum[s] += traj.user_rhs[s] - traj.user_outcomes[t][s];
      worst = std::max(worst, user_sum[s]);
    }
    curve.push_back(worst / static_cast<double>(t + 1));
  }
  return curve;
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& os, const SimTrajectory& traj) {
  os << "t,J_t,I_t,z_t,rev_inst,item_violation_max,user_violation_max,"
        "fallback,eta_t,eps_t";
  if (traj.assortment) os << ",offered_set";
  os << '\n';
  for (const RoundRecord& r : traj.rounds) {
    os << r.t << ',' << r.arrival << ',' << r.item << ','
       << (r.purchase ? 1 : 0) << ',' << format_double(r.rev_inst) << ','
       << format_double(r.item_violation_max) << ','
       << format_double(r.user_violation_max) << ','
       << (r.fallback ? 1 : 0) << ',' << format_double(r.eta) << ','
       << format_double(r.eps);
    if (traj.assortment) {
      os << ',';
      for (std::size_t k = 0; k < r.offered_set.size(); ++k) {
        if (k) os << ';';
        os << r.offered_set[k];
      }
    }
    os << '\n';
  }
}

}  // namespace fairrec

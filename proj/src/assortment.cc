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

#include "fairrec/assortment.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairrec/fair_opt.h"

namespace fairrec {

AssortInstance::AssortInstance(std::vector<double> p, Matrix w,
                               std::vector<double> r, std::size_t K,
                               double sum_tol)
    : p_(std::move(p)), w_(std::move(w)), r_(std::move(r)), K_(K) {
  std::vector<std::string> errs;
  if (p_.empty()) errs.push_back("p must be nonempty");
  if (r_.empty()) errs.push_back("r must be nonempty");
  if (w_.rows() != r_.size() || w_.cols() != p_.size()) {
    errs.push_back("w must be N x M");
  }
  if (K_ < 1) errs.push_back("K must be >= 1");
  double s = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) errs.push_back("p entries must be >= 0");
    s += v;
  }
  if (!p_.empty() && std::abs(s - 1.0) > sum_tol) {
    errs.push_back("p sums to " + std::to_string(s));
  }
  for (double v : w_.data()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      errs.push_back("w entries must be positive and finite");
      break;
    }
  }
  for (double v : r_) {
    if (!std::isfinite(v)) {
      errs.push_back("r entries must be finite");
      break;
    }
  }
  if (!errs.empty()) throw InvalidInstance(errs);
}

AssortInstance AssortInstance::Estimated(std::vector<double> p, Matrix w,
                                         std::vector<double> r,
                                         std::size_t K) {
  if (w.rows() != r.size() || w.cols() != p.size()) {
    throw std::invalid_argument("w must be N x M");
  }
  AssortInstance a;
  a.p_ = std::move(p);
  a.w_ = std::move(w);
  a.r_ = std::move(r);
  a.K_ = K;
  return a;
}

ChoiceProbs mnl_choice_probs(const Assortment& S,
                             std::span<const double> w_col) {
  if (S.empty()) throw std::invalid_argument("empty assortment");
  if (S.size() > w_col.size()) {
    throw std::invalid_argument("assortment larger than item count");
  }
  double total = 1.0;
  for (std::size_t i : S) total += w_col[i];
  ChoiceProbs cp;
  cp.item.reserve(S.size());
  for (std::size_t i : S) cp.item.push_back(w_col[i] / total);
  cp.none = 1.0 / total;
  return cp;
}

std::uint64_t assortment_count(std::size_t n, std::size_t K) {
  constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0, binom = 1;
  for (std::size_t k = 1; k <= std::min(n, K); ++k) {
    // C(n, k) = C(n, k - 1) * (n - k + 1) / k, exact in 128 bits.
    const unsigned __int128 next =
        static_cast<unsigned __int128>(binom) * (n - k + 1) / k;
    if (next > kSat) return kSat;
    binom = static_cast<std::uint64_t>(next);
    if (total > kSat - binom) return kSat;
    total += binom;
  }
  return total;
}

std::vector<Assortment> enumerate_assortments(std::size_t n, std::size_t K) {
  if (n == 0 || K == 0) throw std::invalid_argument("need N >= 1 and K >= 1");
  const std::uint64_t count = assortment_count(n, K);
  if (count > kAssortmentCap) {
    throw std::length_error("assortment count " + std::to_string(count) +
                            " exceeds cap " + std::to_string(kAssortmentCap));
  }
  std::vector<Assortment> out;
  out.reserve(count);
  Assortment cur;
  // Depth-first extension with increasing indices gives lexicographic order.
  auto extend = [&](auto&& self, std::size_t start) -> void {
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      out.push_back(cur);
      if (cur.size() < K) self(self, i + 1);
      cur.pop_back();
    }
  };
  extend(extend, 0);
  return out;
}

LinearOutcomes assort_item_outcomes(const AssortInstance& theta,
                                    const std::vector<Assortment>& sets,
                                    ItemOutcome kind) {
  const std::size_t n = theta.num_items(), m = theta.num_types();
  const std::size_t ns = sets.size();
  LinearOutcomes out{Matrix(n, m * ns, 0.0), {}};
  for (std::size_t j = 0; j < m; ++j) {
    const std::vector<double> wj = theta.w().col(j);
    std::vector<std::size_t> group(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      group[s] = j * ns + s;
      const ChoiceProbs cp = mnl_choice_probs(sets[s], wj);
      for (std::size_t k = 0; k < sets[s].size(); ++k) {
        const std::size_t i = sets[s][k];
        double v = theta.p()[j];
        if (kind == ItemOutcome::kMarketshare) v *= cp.item[k];
        if (kind == ItemOutcome::kExpectedRevenue) v *= theta.r()[i] * cp.item[k];
        out.coef(i, j * ns + s) = v;
      }
    }
    out.groups.push_back(std::move(group));
  }
  return out;
}

Matrix assort_user_coef(const AssortInstance& theta,
                        const std::vector<Assortment>& sets) {
  Matrix c(theta.num_types(), sets.size());
  for (std::size_t j = 0; j < theta.num_types(); ++j) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      double ws = 0.0;
      for (std::size_t i : sets[s]) ws += theta.w()(i, j);
      c(j, s) = std::log1p(ws);
    }
  }
  return c;
}

Matrix assort_revenue_coef(const AssortInstance& theta,
                           const std::vector<Assortment>& sets) {
  Matrix c(theta.num_types(), sets.size());
  for (std::size_t j = 0; j < theta.num_types(); ++j) {
    const std::vector<double> wj = theta.w().col(j);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const ChoiceProbs cp = mnl_choice_probs(sets[s], wj);
      double v = 0.0;
      for (std::size_t k = 0; k < sets[s].size(); ++k) {
        v += theta.r()[sets[s][k]] * cp.item[k];
      }
      c(j, s) = v;
    }
  }
  return c;
}

double assort_revenue(const AssortInstance& theta, const AssortPolicy& q) {
  const Matrix c = assort_revenue_coef(theta, q.sets);
  double v = 0.0;
  for (std::size_t j = 0; j < theta.num_types(); ++j) {
    for (std::size_t s = 0; s < q.sets.size(); ++s) {
      v += theta.p()[j] * q.q(j, s) * c(j, s);
    }
  }
  return v;
}

std::vector<double> assort_item_values(const LinearOutcomes& item,
                                       const Matrix& q) {
  const auto flat = q.data();
  std::vector<double> out(item.n_stakeholders(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = item.coef.row(i);
    for (std::size_t v = 0; v < flat.size(); ++v) out[i] += row[v] * flat[v];
  }
  return out;
}

std::vector<double> assort_user_values(const Matrix& user_coef,
                                       const Matrix& q) {
  std::vector<double> out(user_coef.rows(), 0.0);
  for (std::size_t j = 0; j < user_coef.rows(); ++j) {
    for (std::size_t s = 0; s < user_coef.cols(); ++s) {
      out[j] += user_coef(j, s) * q(j, s);
    }
  }
  return out;
}

std::vector<std::size_t> user_fair_assortments(
    const AssortInstance& theta, const std::vector<Assortment>& sets) {
  const std::size_t n = theta.num_items();
  const std::size_t k = std::min(theta.K(), n);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < theta.num_types(); ++j) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return theta.w()(a, j) > theta.w()(b, j);
    });
    Assortment best(idx.begin(), idx.begin() + static_cast<long>(k));
    std::sort(best.begin(), best.end());
    const auto it = std::lower_bound(sets.begin(), sets.end(), best);
    if (it == sets.end() || *it != best) {
      throw std::invalid_argument("user-fair assortment not enumerated");
    }
    out.push_back(static_cast<std::size_t>(it - sets.begin()));
  }
  return out;
}

AssortTargets assort_targets(const AssortInstance& theta,
                             const std::vector<Assortment>& sets,
                             const OutcomeSpec& spec,
                             const FairnessConfig& cfg) {
  cfg.Validate(theta.num_items());
  const std::size_t m = theta.num_types(), ns = sets.size();
  AssortTargets t;
  t.item = assort_item_outcomes(theta, sets, spec.item_kind);
  t.user_coef = assort_user_coef(theta, sets);
  const std::vector<double> f = solve_item_fair(t.item, cfg);
  t.item_fair = Matrix(m, ns);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t s = 0; s < ns; ++s) t.item_fair(j, s) = f[j * ns + s];
  }
  t.user_fair = Matrix(m, ns, 0.0);
  const auto best = user_fair_assortments(theta, sets);
  for (std::size_t j = 0; j < m; ++j) t.user_fair(j, best[j]) = 1.0;
  t.item_rhs = assort_item_values(t.item, t.item_fair);
  for (double& v : t.item_rhs) v *= cfg.delta_item;
  t.user_rhs = assort_user_values(t.user_coef, t.user_fair);
  for (double& v : t.user_rhs) v *= cfg.delta_user;
  return t;
}

AssortSolveResult solve_fair_assort_targets(const AssortInstance& theta,
                                            const std::vector<Assortment>& sets,
                                            const AssortTargets& targets,
                                            double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const std::size_t n = theta.num_items(), m = theta.num_types();
  const std::size_t ns = sets.size();
  const Matrix rev = assort_revenue_coef(theta, sets);
  LinearProgram lp(m * ns);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t s = 0; s < ns; ++s) {
      lp.objective()[j * ns + s] = theta.p()[j] * rev(j, s);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = targets.item.coef.row(i);
    lp.AddRow(std::vector<double>(row.begin(), row.end()),
              Relation::kGreaterEqual, targets.item_rhs[i] - eta);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> a(m * ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) a[j * ns + s] = targets.user_coef(j, s);
    lp.AddRow(std::move(a), Relation::kGreaterEqual, targets.user_rhs[j] - eta);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> a(m * ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) a[j * ns + s] = 1.0;
    lp.AddRow(std::move(a), Relation::kEqual, 1.0);
  }

  AssortSolveResult res;
  const LpSolution sol = solve_lp(lp);
  res.status = sol.status;
  if (sol.status != LpStatus::kOptimal) return res;
  res.policy.sets = sets;
  res.policy.q = Matrix(m, ns);
  for (std::size_t j = 0; j < m; ++j) {
    double total = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      res.policy.q(j, s) = std::max(sol.x[j * ns + s], 0.0);
      total += res.policy.q(j, s);
    }
    for (std::size_t s = 0; s < ns; ++s) res.policy.q(j, s) /= total;
  }
  res.revenue = assort_revenue(theta, res.policy);
  return res;
}

AssortSolveResult solve_fair_assort(const AssortInstance& theta,
                                    const OutcomeSpec& spec,
                                    const FairnessConfig& cfg, double eta) {
  const auto sets = enumerate_assortments(theta.num_items(), theta.K());
  return solve_fair_assort_targets(
      theta, sets, assort_targets(theta, sets, spec, cfg), eta);
}

std::size_t sample_choice(const Assortment& S, std::span<const double> w_col,
                          std::size_t n_items, Rng& rng) {
  const ChoiceProbs cp = mnl_choice_probs(S, w_col);
  std::vector<double> probs = cp.item;
  probs.push_back(cp.none);
  const std::size_t k = rng.Categorical(probs);
  return k < S.size() ? S[k] : n_items;
}

EpochEstimator::EpochEstimator(std::size_t n, std::size_t m)
    : n_(n),
      m_(m),
      w_hat_(n, m, 0.5),
      purchase_sum_(n, m, 0.0),
      shown_epochs_(n, m, 0.0),
      tally_(n, m, 0.0),
      counts_(m, 0),
      epochs_(m, 0) {
  if (n == 0 || m == 0) throw std::invalid_argument("empty estimator");
}

bool EpochEstimator::Observe(std::size_t type, const Assortment& offered,
                             std::size_t choice) {
  if (type >= m_) throw std::out_of_range("arrival type");
  ++t_;
  ++counts_[type];
  if (choice < n_) {
    tally_(choice, type) += 1.0;
    return false;
  }
  for (std::size_t i : offered) {
    shown_epochs_(i, type) += 1.0;
    purchase_sum_(i, type) += tally_(i, type);
    w_hat_(i, type) = purchase_sum_(i, type) / shown_epochs_(i, type);
  }
  for (std::size_t i = 0; i < n_; ++i) tally_(i, type) = 0.0;
  ++epochs_[type];
  return true;
}

std::vector<double> EpochEstimator::p_hat() const {
  std::vector<double> p(m_, 1.0 / static_cast<double>(m_));
  if (t_ == 0) return p;
  for (std::size_t j = 0; j < m_; ++j) {
    p[j] = static_cast<double>(counts_[j]) / static_cast<double>(t_);
  }
  return p;
}

AssortInstance EpochEstimator::Estimate(const std::vector<double>& r,
                                        std::size_t K) const {
  Matrix w = w_hat_;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      w(i, j) = std::clamp(w(i, j), kWeightFloor, kWeightCeil);
    }
  }
  return AssortInstance::Estimated(p_hat(), std::move(w), r, K);
}

std::uint64_t EpochEstimator::Hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (double v : w_hat_.data()) mix(v);
  for (double v : p_hat()) mix(v);
  return h;
}

AssortMetricCache assort_metrics(const AssortInstance& theta,
                                 const std::vector<Assortment>& sets,
                                 const AssortTargets& targets,
                                 const Matrix& q) {
  AssortMetricCache c;
  c.item = assort_item_values(targets.item, q);
  c.user = assort_user_values(targets.user_coef, q);
  c.revenue = assort_revenue(theta, AssortPolicy{sets, q});
  return c;
}

void record_assort_metrics(SimTrajectory& traj, RoundRecord& rec,
                           const AssortMetricCache& cache) {
  rec.rev_inst = cache.revenue;
  rec.item_violation_max = 0.0;
  rec.user_violation_max = 0.0;
  for (std::size_t i = 0; i < cache.item.size(); ++i) {
    rec.item_violation_max =
        std::max(rec.item_violation_max, traj.item_rhs[i] - cache.item[i]);
  }
  for (std::size_t j = 0; j < cache.user.size(); ++j) {
    rec.user_violation_max =
        std::max(rec.user_violation_max, traj.user_rhs[j] - cache.user[j]);
  }
  traj.item_outcomes.push_back(cache.item);
  traj.user_outcomes.push_back(cache.user);
}

SimTrajectory run_form_assort(const AssortInstance& theta_true,
                              const OutcomeSpec& spec,
                              const FairnessConfig& cfg, std::size_t T,
                              std::uint64_t seed, const FormOptions& opts) {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  if (opts.window) {
    throw std::invalid_argument("windowed estimates apply to single-item runs");
  }
  const std::size_t n = theta_true.num_items(), m = theta_true.num_types();
  const auto sets = enumerate_assortments(n, theta_true.K());
  const std::size_t ns = sets.size();
  const ArrivalProcess arrivals = opts.periodic_p.empty()
                                      ? ArrivalProcess(theta_true.p())
                                      : ArrivalProcess(opts.periodic_p);
  if (arrivals.num_types() != m) {
    throw std::invalid_argument("arrival pattern length differs from M");
  }
  const AssortInstance theta_metric =
      opts.periodic_p.empty()
          ? theta_true
          : AssortInstance(arrivals.time_average(T), theta_true.w(),
                           theta_true.r(), theta_true.K(), kArrivalSumFileTol);
  const AssortTargets targets = assort_targets(theta_metric, sets, spec, cfg);
  const Schedules sched(T, ns, m, opts.kappa);

  SimTrajectory traj;
  traj.seed = seed;
  traj.algorithm = "form";
  traj.kappa = opts.kappa;
  traj.assortment = true;
  traj.item_rhs = targets.item_rhs;
  traj.user_rhs = targets.user_rhs;
  traj.realized_item_revenue.assign(n, 0.0);
  traj.rounds.reserve(T);

  RngStreams rng(seed);
  EpochEstimator est(n, m);
  Matrix q(m, ns, 1.0 / static_cast<double>(ns));
  std::vector<std::size_t> current(m);
  for (std::size_t j = 0; j < m; ++j) current[j] = rng.items.UniformIndex(ns);
  std::vector<bool> fallback(m, false);
  std::vector<LpStatus> status(m, LpStatus::kOptimal);
  AssortMetricCache cache = assort_metrics(theta_metric, sets, targets, q);

  for (std::size_t t = 1; t <= T; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.estimate_hash = est.Hash();
    const std::size_t J = rng.arrivals.Categorical(arrivals.at(t));
    rec.arrival = J;
    const Assortment& S = sets[current[J]];
    rec.offered_set = S;
    const std::size_t choice =
        sample_choice(S, theta_true.w().col(J), n, rng.purchases);
    rec.purchase = choice < n;
    rec.item = rec.purchase ? static_cast<long>(choice) : -1;
    if (rec.purchase) traj.realized_item_revenue[choice] += theta_true.r()[choice];
    rec.eps = sched.epsilon(t);
    rec.eta = sched.eta(t);
    rec.fallback = fallback[J];
    rec.relax_status = status[J];
    record_assort_metrics(traj, rec, cache);
    traj.rounds.push_back(std::move(rec));

    if (!est.Observe(J, S, choice)) continue;
    const AssortInstance theta_hat = est.Estimate(theta_true.r(), theta_true.K());
    AssortSolveResult res;
    try {
      res = solve_fair_assort_targets(
          theta_hat, sets, assort_targets(theta_hat, sets, spec, cfg),
          sched.eta(t));
    } catch (const NumericalError& e) {
      throw SolverFailure(t, e.what());
    } catch (const std::invalid_argument&) {
      res.status = LpStatus::kInfeasible;
    }
    status[J] = res.status;
    fallback[J] = res.status != LpStatus::kOptimal;
    const double eps = sched.epsilon(t);
    for (std::size_t s = 0; s < ns; ++s) {
      q(J, s) = fallback[J]
                    ? 1.0 / static_cast<double>(ns)
                    : (1.0 - static_cast<double>(ns) * eps) * res.policy.q(J, s) +
                          eps;
    }
    current[J] = rng.items.Categorical(q.row(J));
    cache = assort_metrics(theta_metric, sets, targets, q);
  }
  return traj;
}

}  // namespace fairrec

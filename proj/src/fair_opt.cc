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

#include "fairrec/fair_opt.h"

#include <algorithm>
#include <cmath>

#include "fairrec/fair_solutions.h"

namespace fairrec {

OptRev opt_rev(const Instance& theta) {
  const std::size_t n = theta.num_items(), m = theta.num_types();
  std::vector<std::size_t> best(m, 0);
  double value = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 1; i < n; ++i) {
      if (theta.r()[i] * theta.y()(i, j) >
          theta.r()[best[j]] * theta.y()(best[j], j)) {
        best[j] = i;
      }
    }
    value += theta.p()[j] * theta.r()[best[j]] * theta.y()(best[j], j);
  }
  return OptRev{value, Policy::Deterministic(n, best)};
}

FairTargets fair_targets(const Instance& theta, const OutcomeSpec& spec,
                         const FairnessConfig& cfg) {
  cfg.Validate(theta.num_items());
  FairTargets t;
  t.L = item_outcome_matrix(theta, spec);
  t.U = user_outcome_matrix(theta, spec);
  t.item_fair = item_fair_solution(t.L, cfg);
  t.user_fair = user_fair_solution(t.U);
  t.item_rhs = item_outcomes(t.L, t.item_fair);
  for (double& v : t.item_rhs) v *= cfg.delta_item;
  t.user_rhs = user_outcomes(t.U, t.user_fair);
  for (double& v : t.user_rhs) v *= cfg.delta_user;
  return t;
}

FairSolveResult solve_fair_targets(const Instance& theta,
                                   const FairTargets& t, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  const std::size_t n = theta.num_items(), m = theta.num_types();
  LinearProgram lp(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      lp.objective()[i * m + j] =
          theta.r()[i] * theta.p()[j] * theta.y()(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(n * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = t.L(i, j);
    lp.AddRow(std::move(a), Relation::kGreaterEqual, t.item_rhs[i] - eta);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> a(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * m + j] = t.U(i, j);
    lp.AddRow(std::move(a), Relation::kGreaterEqual, t.user_rhs[j] - eta);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> a(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * m + j] = 1.0;
    lp.AddRow(std::move(a), Relation::kEqual, 1.0);
  }

  FairSolveResult res;
  const LpSolution sol = solve_lp(lp);
  res.status = sol.status;
  if (sol.status != LpStatus::kOptimal) return res;

  // Snap to exact column sums; the LP already satisfies them within 1e-7.
  Matrix x(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x(i, j) = std::max(sol.x[i * m + j], 0.0);
      s += x(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) x(i, j) /= s;
  }
  res.policy = Policy(std::move(x));
  res.fair_rev = expected_revenue(res.policy, theta);
  const auto oi = item_outcomes(t.L, res.policy);
  const auto ou = user_outcomes(t.U, res.policy);
  for (std::size_t i = 0; i < n; ++i) {
    res.slack.push_back(oi[i] - (t.item_rhs[i] - eta));
  }
  for (std::size_t j = 0; j < m; ++j) {
    res.slack.push_back(ou[j] - (t.user_rhs[j] - eta));
  }
  return res;
}

FairSolveResult solve_fair(const Instance& theta, const OutcomeSpec& spec,
                           const FairnessConfig& cfg) {
  return solve_fair_targets(theta, fair_targets(theta, spec, cfg), 0.0);
}

FairSolveResult solve_fair_relax(const Instance& theta_hat,
                                 const OutcomeSpec& spec,
                                 const FairnessConfig& cfg, double eta) {
  return solve_fair_targets(theta_hat, fair_targets(theta_hat, spec, cfg), eta);
}

double fairness_shortfall(const Policy& x, const FairTargets& t, double eta) {
  double worst = 0.0;
  const auto oi = item_outcomes(t.L, x);
  const auto ou = user_outcomes(t.U, x);
  for (std::size_t i = 0; i < oi.size(); ++i) {
    worst = std::max(worst, t.item_rhs[i] - eta - oi[i]);
  }
  for (std::size_t j = 0; j < ou.size(); ++j) {
    worst = std::max(worst, t.user_rhs[j] - eta - ou[j]);
  }
  return worst;
}

double price_of_fairness(const Instance& theta, const OutcomeSpec& spec,
                         const FairnessConfig& cfg) {
  const FairSolveResult fair = solve_fair(theta, spec, cfg);
  if (fair.status != LpStatus::kOptimal) throw InfeasibleFair();
  const double opt = opt_rev(theta).value;
  return std::clamp((opt - fair.fair_rev) / opt, 0.0, 1.0);
}

ConstraintSystem fair_constraint_system(const Instance& theta,
                                        const FairTargets& t) {
  const std::size_t n = theta.num_items(), m = theta.num_types();
  ConstraintSystem sys{Matrix(n + m + 2 * m, n * m, 0.0), {}};
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i, ++row) {
    for (std::size_t j = 0; j < m; ++j) sys.A(row, i * m + j) = -t.L(i, j);
    sys.b.push_back(-t.item_rhs[i]);
  }
  for (std::size_t j = 0; j < m; ++j, ++row) {
    for (std::size_t i = 0; i < n; ++i) sys.A(row, i * m + j) = -t.U(i, j);
    sys.b.push_back(-t.user_rhs[j]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      sys.A(row, i * m + j) = 1.0;
      sys.A(row + 1, i * m + j) = -1.0;
    }
    sys.b.push_back(1.0);
    sys.b.push_back(-1.0);
    row += 2;
  }
  return sys;
}

double pof_upper_bound(const Instance& theta, const OutcomeSpec& spec,
                       const FairnessConfig& cfg) {
  const FairTargets t = fair_targets(theta, spec, cfg);
  const ConstraintSystem sys = fair_constraint_system(theta, t);
  const Policy& x_opt = opt_rev(theta).policy;
  std::vector<double> flat(theta.num_items() * theta.num_types());
  for (std::size_t i = 0; i < theta.num_items(); ++i) {
    for (std::size_t j = 0; j < theta.num_types(); ++j) {
      flat[i * theta.num_types() + j] = x_opt(i, j);
    }
  }
  const double violation = max_violation(sys.A, sys.b, flat);
  if (violation <= 0.0) return 0.0;
  return hoffman_constant(sys.A) * violation;
}

}  // namespace fairrec

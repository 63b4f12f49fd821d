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

#include "fairrec/fair_solutions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fairrec/lp.h"

namespace fairrec {
namespace {

constexpr double kLexTol = 1e-8;

double coef_scale(const Matrix& coef) {
  double s = 0.0;
  for (double v : coef.data()) s = std::max(s, std::abs(v));
  return s;
}

// LP over [x | extras] with the simplex rows already in place.
LinearProgram make_lp(const LinearOutcomes& out, std::size_t n_extra) {
  LinearProgram lp(out.n_vars() + n_extra);
  for (const auto& g : out.groups) {
    std::vector<double> a(lp.n_vars(), 0.0);
    for (std::size_t k : g) a[k] = 1.0;
    lp.AddRow(std::move(a), Relation::kEqual, 1.0);
  }
  return lp;
}

std::vector<double> outcome_row(const LinearOutcomes& out, std::size_t s,
                                std::size_t width) {
  std::vector<double> a(width, 0.0);
  const auto row = out.coef.row(s);
  std::copy(row.begin(), row.end(), a.begin());
  return a;
}

LpSolution must_solve(const LinearProgram& lp, const char* what) {
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw NumericalError(std::string("item-fair LP (") + what +
                         ") returned " + to_string(sol.status));
  }
  return sol;
}

// Stage 2: pin the stage-1 SWF variable and maximize total outcome.
std::vector<double> lexicographic_secondary(const LinearOutcomes& out,
                                            LinearProgram lp,
                                            std::size_t swf_var, bool maximize,
                                            double stage1_value) {
  const double tol =
      kLexTol * std::max({std::abs(stage1_value), coef_scale(out.coef), 1e-12});
  std::vector<double> pin(lp.n_vars(), 0.0);
  pin[swf_var] = 1.0;
  if (maximize) {
    lp.AddRow(std::move(pin), Relation::kGreaterEqual, stage1_value - tol);
  } else {
    lp.AddRow(std::move(pin), Relation::kLessEqual, stage1_value + tol);
  }
  std::fill(lp.objective().begin(), lp.objective().end(), 0.0);
  for (std::size_t s = 0; s < out.n_stakeholders(); ++s) {
    for (std::size_t k = 0; k < out.n_vars(); ++k) {
      lp.objective()[k] += out.coef(s, k);
    }
  }
  return must_solve(lp, "secondary").x;
}

std::vector<double> normalize_groups(const LinearOutcomes& out,
                                     const std::vector<double>& sol) {
  std::vector<double> x(sol.begin(), sol.begin() + out.n_vars());
  for (const auto& g : out.groups) {
    double s = 0.0;
    for (std::size_t k : g) {
      x[k] = std::max(x[k], 0.0);
      s += x[k];
    }
    if (s <= 0.0) throw NumericalError("item-fair solution has empty group");
    for (std::size_t k : g) x[k] /= s;
  }
  return x;
}

std::vector<double> solve_maxmin(const LinearOutcomes& out) {
  const std::size_t n = out.n_vars(), z = n;
  LinearProgram lp = make_lp(out, 1);
  lp.SetBounds(z, -kInf, kInf);
  for (std::size_t s = 0; s < out.n_stakeholders(); ++s) {
    auto a = outcome_row(out, s, n + 1);
    a[z] = -1.0;
    lp.AddRow(std::move(a), Relation::kGreaterEqual, 0.0);
  }
  lp.objective()[z] = 1.0;
  const LpSolution stage1 = must_solve(lp, "maxmin");
  return lexicographic_secondary(out, lp, z, true, stage1.objective_value);
}

std::vector<double> solve_ks(const LinearOutcomes& out) {
  const std::size_t n = out.n_vars(), beta = n;
  LinearProgram lp = make_lp(out, 1);
  lp.SetBounds(beta, 0.0, 1.0);
  for (std::size_t s = 0; s < out.n_stakeholders(); ++s) {
    const double best = out.max_attainable(s);
    if (!(best > 0.0)) {
      throw std::invalid_argument(
          "K-S fairness needs every stakeholder to have a positive maximum "
          "outcome (zero row)");
    }
    auto a = outcome_row(out, s, n + 1);
    for (std::size_t k = 0; k < n; ++k) a[k] /= best;
    a[beta] = -1.0;
    lp.AddRow(std::move(a), Relation::kGreaterEqual, 0.0);
  }
  lp.objective()[beta] = 1.0;
  const LpSolution stage1 = must_solve(lp, "ks");
  return lexicographic_secondary(out, lp, beta, true, stage1.objective_value);
}

// Hooker-Williams LP relaxation over (x, z, v, w, d) with Gamma fixed to
// 2 * M * max|L| + Delta.
std::vector<double> solve_hw(const LinearOutcomes& out, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("Hooker-Williams delta must be positive");
  }
  const std::size_t n = out.n_vars(), S = out.n_stakeholders();
  const std::size_t z = n, v0 = n + 1, w = n + 1 + S, d0 = n + 2 + S;
  const std::size_t width = n + 2 + 2 * S;
  const double gamma =
      2.0 * static_cast<double>(out.groups.size()) * coef_scale(out.coef) +
      delta;
  LinearProgram lp = make_lp(out, 2 + 2 * S);
  for (std::size_t s = 0; s < S; ++s) lp.SetBounds(d0 + s, 0.0, 1.0);

  std::vector<double> top(width, 0.0);
  top[z] = 1.0;
  for (std::size_t s = 0; s < S; ++s) top[v0 + s] = -1.0;
  lp.AddRow(std::move(top), Relation::kLessEqual,
            static_cast<double>(S - 1) * delta);
  for (std::size_t s = 0; s < S; ++s) {
    // L_s.x - Delta <= v_s
    auto a = outcome_row(out, s, width);
    a[v0 + s] = -1.0;
    lp.AddRow(std::move(a), Relation::kLessEqual, delta);
    // v_s <= L_s.x - Delta * d_s
    auto b = outcome_row(out, s, width);
    for (double& c : b) c = -c;
    b[v0 + s] = 1.0;
    b[d0 + s] = delta;
    lp.AddRow(std::move(b), Relation::kLessEqual, 0.0);
    // w <= v_s
    std::vector<double> c(width, 0.0);
    c[w] = 1.0;
    c[v0 + s] = -1.0;
    lp.AddRow(std::move(c), Relation::kLessEqual, 0.0);
    // v_s <= w + (Gamma - Delta) d_s
    std::vector<double> e(width, 0.0);
    e[v0 + s] = 1.0;
    e[w] = -1.0;
    e[d0 + s] = -(gamma - delta);
    lp.AddRow(std::move(e), Relation::kLessEqual, 0.0);
  }
  lp.objective()[z] = 1.0;
  const LpSolution stage1 = must_solve(lp, "hooker-williams");
  return lexicographic_secondary(out, lp, z, true, stage1.objective_value);
}

std::vector<double> solve_parity(const LinearOutcomes& out,
                                 const std::vector<std::size_t>& group) {
  const std::size_t n = out.n_vars(), S = out.n_stakeholders();
  std::vector<bool> in(S, false);
  for (std::size_t s : group) {
    if (s >= S || in[s]) {
      throw std::invalid_argument("parity group has invalid item index");
    }
    in[s] = true;
  }
  if (group.empty() || group.size() >= S) {
    throw std::invalid_argument(
        "parity group must be a nonempty proper subset of items");
  }
  const double w_in = 1.0 / static_cast<double>(group.size());
  const double w_out = 1.0 / static_cast<double>(S - group.size());
  std::vector<double> diff(n + 1, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const double w = in[s] ? w_in : -w_out;
    for (std::size_t k = 0; k < n; ++k) diff[k] += w * out.coef(s, k);
  }
  const std::size_t dvar = n;
  LinearProgram lp = make_lp(out, 1);
  auto up = diff;
  up[dvar] = -1.0;  // diff - d <= 0
  lp.AddRow(std::move(up), Relation::kLessEqual, 0.0);
  auto dn = diff;
  for (double& c : dn) c = -c;
  dn[dvar] = -1.0;  // -diff - d <= 0
  lp.AddRow(std::move(dn), Relation::kLessEqual, 0.0);
  lp.objective()[dvar] = -1.0;
  const LpSolution stage1 = must_solve(lp, "parity");
  return lexicographic_secondary(out, lp, dvar, false, -stage1.objective_value);
}

}  // namespace

double LinearOutcomes::max_attainable(std::size_t s) const {
  double total = 0.0;
  for (const auto& g : groups) {
    double best = 0.0;
    for (std::size_t k : g) best = std::max(best, coef(s, k));
    total += best;
  }
  return total;
}

LinearOutcomes single_item_outcomes(const Matrix& L) {
  const std::size_t n = L.rows(), m = L.cols();
  LinearOutcomes out{Matrix(n, n * m, 0.0), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(L(i, j))) {
        throw std::invalid_argument("outcome matrix has non-finite entries");
      }
      out.coef(i, i * m + j) = L(i, j);
    }
  }
  out.groups.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.groups[j].push_back(i * m + j);
  }
  return out;
}

Policy policy_from_vector(std::span<const double> v, std::size_t n,
                          std::size_t m) {
  Matrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x(i, j) = v[i * m + j];
  }
  return Policy(std::move(x));
}

std::vector<double> solve_item_fair(const LinearOutcomes& outcomes,
                                    const FairnessConfig& cfg) {
  std::vector<double> sol;
  switch (cfg.swf) {
    case SwfKind::kMaxmin: sol = solve_maxmin(outcomes); break;
    case SwfKind::kKalaiSmorodinsky: sol = solve_ks(outcomes); break;
    case SwfKind::kHookerWilliams: sol = solve_hw(outcomes, cfg.hw_delta); break;
    case SwfKind::kDemographicParity:
      sol = solve_parity(outcomes, cfg.parity_group);
      break;
  }
  return normalize_groups(outcomes, sol);
}

Policy item_fair_solution(const Matrix& L, const FairnessConfig& cfg) {
  const auto x = solve_item_fair(single_item_outcomes(L), cfg);
  return policy_from_vector(x, L.rows(), L.cols());
}

Policy item_fair_maxmin(const Matrix& L) {
  FairnessConfig cfg;
  cfg.swf = SwfKind::kMaxmin;
  return item_fair_solution(L, cfg);
}

Policy item_fair_ks(const Matrix& L) {
  FairnessConfig cfg;
  cfg.swf = SwfKind::kKalaiSmorodinsky;
  return item_fair_solution(L, cfg);
}

Policy item_fair_hw(const Matrix& L, double delta) {
  FairnessConfig cfg;
  cfg.swf = SwfKind::kHookerWilliams;
  cfg.hw_delta = delta;
  return item_fair_solution(L, cfg);
}

Policy item_fair_parity(const Matrix& L,
                        const std::vector<std::size_t>& group) {
  FairnessConfig cfg;
  cfg.swf = SwfKind::kDemographicParity;
  cfg.parity_group = group;
  return item_fair_solution(L, cfg);
}

Policy user_fair_solution(const Matrix& U) {
  std::vector<std::size_t> choice(U.cols(), 0);
  for (std::size_t j = 0; j < U.cols(); ++j) {
    for (std::size_t i = 1; i < U.rows(); ++i) {
      if (U(i, j) > U(choice[j], j)) choice[j] = i;
    }
  }
  return Policy::Deterministic(U.rows(), choice);
}

double swf_value(std::span<const double> o, SwfEval kind,
                 const SwfParams& params) {
  if (o.empty()) throw std::invalid_argument("empty outcome vector");
  for (double v : o) {
    if (!(v >= 0.0)) throw std::domain_error("outcomes must be nonnegative");
  }
  const double lo = *std::min_element(o.begin(), o.end());
  switch (kind) {
    case SwfEval::kMaxmin:
      return lo;
    case SwfEval::kNash: {
      double s = 0.0;
      for (double v : o) {
        if (v <= 0.0) throw std::domain_error("Nash welfare of a zero outcome");
        s += std::log(v);
      }
      return s;
    }
    case SwfEval::kHookerWilliams: {
      double s = 0.0;
      for (double v : o) s += std::max(v - params.hw_delta, lo);
      return s;
    }
    case SwfEval::kDemographicParity: {
      const auto& g = params.parity_group;
      if (g.empty() || g.size() >= o.size()) {
        throw std::invalid_argument("parity group must be a proper subset");
      }
      std::vector<bool> in(o.size(), false);
      for (std::size_t s : g) in.at(s) = true;
      double a = 0.0, b = 0.0;
      for (std::size_t s = 0; s < o.size(); ++s) (in[s] ? a : b) += o[s];
      a /= static_cast<double>(g.size());
      b /= static_cast<double>(o.size() - g.size());
      return 1.0 - std::abs(a - b);
    }
    case SwfEval::kKalaiSmorodinsky: {
      if (params.ks_max.size() != o.size()) {
        throw std::invalid_argument("K-S evaluation needs per-stakeholder maxima");
      }
      const double beta = o[0] / params.ks_max[0];
      for (std::size_t s = 1; s < o.size(); ++s) {
        if (std::abs(o[s] / params.ks_max[s] - beta) > 1e-9) {
          return -std::numeric_limits<double>::infinity();
        }
      }
      return std::accumulate(o.begin(), o.end(), 0.0);
    }
  }
  return 0.0;
}

}  // namespace fairrec

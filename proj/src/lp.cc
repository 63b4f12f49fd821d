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

#include "fairrec/lp.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairrec {
namespace {

constexpr double kCostTol = 1e-9;     // entering reduced cost
constexpr double kPivotTol = 1e-9;    // ratio-test eligibility
constexpr double kTinyPivot = 1e-12;  // below this a pivot is an error
constexpr int kDegenerateRunForBland = 30;

// How an original variable is expressed through nonnegative columns.
struct VarMap {
  double offset = 0.0;
  int pos = -1;  // column with coefficient `sign`
  double sign = 1.0;
  int neg = -1;  // second column (coefficient -1) for free variables
};

struct StdRow {
  std::vector<double> a;  // over structural columns
  Relation rel;
  double b;
};

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t cols)
      : m_(m), cols_(cols), width_(cols + 1), t_(m * width_, 0.0),
        basis_(m, 0), allowed_(cols, true) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
  double& rhs(std::size_t r) { return t_[r * width_ + cols_]; }
  double rhs(std::size_t r) const { return t_[r * width_ + cols_]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::vector<bool>& allowed() { return allowed_; }

  void Pivot(std::size_t r, std::size_t k, std::vector<double>& d) {
    const double piv = at(r, k);
    if (std::abs(piv) < kTinyPivot) {
      throw NumericalError("simplex pivot magnitude below 1e-12");
    }
    double* pr = &t_[r * width_];
    const double inv = 1.0 / piv;
    for (std::size_t c = 0; c < width_; ++c) pr[c] *= inv;
    pr[k] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &t_[i * width_];
      const double f = pi[k];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) pi[c] -= f * pr[c];
      pi[k] = 0.0;
    }
    const double f = d[k];
    if (f != 0.0) {
      for (std::size_t c = 0; c < width_; ++c) d[c] -= f * pr[c];
      d[k] = 0.0;
    }
    basis_[r] = k;
  }

  // Reduced-cost row for maximizing cost.x; last entry holds -objective.
  std::vector<double> ReducedCosts(const std::vector<double>& cost) const {
    std::vector<double> d(width_, 0.0);
    for (std::size_t c = 0; c < cols_; ++c) d[c] = cost[c];
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* pr = &t_[r * width_];
      for (std::size_t c = 0; c < width_; ++c) d[c] -= cb * pr[c];
    }
    return d;
  }

  // Runs primal simplex on d. Returns false when unbounded.
  bool Optimize(std::vector<double>& d) {
    const std::size_t max_iter = 50000 + 200 * (m_ + cols_);
    int degenerate_run = 0;
    bool bland = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::size_t enter = cols_;
      double best = kCostTol;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!allowed_[c] || d[c] <= kCostTol) continue;
        if (bland) {
          enter = c;
          break;
        }
        if (d[c] > best) {
          best = d[c];
          enter = c;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double best_ratio = kInf;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs(r), 0.0) / a;
        if (leave == m_) {
          best_ratio = ratio;
          leave = r;
          continue;
        }
        const double slack = 1e-12 * std::max(1.0, best_ratio);
        if (ratio < best_ratio - slack ||
            (ratio <= best_ratio + slack && basis_[r] < basis_[leave])) {
          best_ratio = std::min(ratio, best_ratio);
          leave = r;
        }
      }
      if (leave == m_) return false;

      if (best_ratio <= 1e-12) {
        if (++degenerate_run >= kDegenerateRunForBland) bland = true;
      } else {
        degenerate_run = 0;
      }
      Pivot(leave, enter, d);
    }
    throw NumericalError("simplex iteration limit exceeded");
  }

 private:
  std::size_t m_, cols_, width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
};

}  // namespace

LinearProgram::LinearProgram(std::size_t n_vars)
    : objective_(n_vars, 0.0), lower_(n_vars, 0.0), upper_(n_vars, kInf) {}

void LinearProgram::AddRow(std::vector<double> a, Relation relation, double b) {
  if (a.size() != n_vars()) {
    throw std::invalid_argument("LP row length does not match variable count");
  }
  rows_.push_back(LpRow{std::move(a), relation, b});
}

void LinearProgram::SetBounds(std::size_t var, double lo, double hi) {
  if (var >= n_vars()) throw std::out_of_range("LP variable index");
  lower_[var] = lo;
  upper_[var] = hi;
}

void LinearProgram::Validate() const {
  for (double c : objective_) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective");
  }
  for (const auto& row : rows_) {
    if (row.a.size() != n_vars()) {
      throw std::invalid_argument("LP row length does not match variable count");
    }
    if (!std::isfinite(row.b)) throw std::invalid_argument("non-finite rhs");
    for (double v : row.a) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite constraint coefficient");
      }
    }
  }
  for (std::size_t j = 0; j < n_vars(); ++j) {
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) ||
        lower_[j] == kInf || upper_[j] == -kInf || lower_[j] > upper_[j]) {
      throw std::invalid_argument("invalid variable bounds");
    }
  }
}

std::string LinearProgram::Dump() const {
  std::ostringstream os;
  os.precision(17);
  auto term_list = [&](const std::vector<double>& a) {
    bool any = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] == 0.0) continue;
      os << (any ? (a[j] < 0 ? " - " : " + ") : (a[j] < 0 ? "-" : ""))
         << std::abs(a[j]) << " x" << j;
      any = true;
    }
    if (!any) os << "0";
  };
  os << "maximize ";
  term_list(objective_);
  os << "\nsubject to\n";
  for (const auto& row : rows_) {
    os << "  ";
    term_list(row.a);
    switch (row.relation) {
      case Relation::kLessEqual: os << " <= "; break;
      case Relation::kGreaterEqual: os << " >= "; break;
      case Relation::kEqual: os << " = "; break;
    }
    os << row.b << "\n";
  }
  os << "bounds\n";
  for (std::size_t j = 0; j < n_vars(); ++j) {
    os << "  " << lower_[j] << " <= x" << j << " <= " << upper_[j] << "\n";
  }
  return os.str();
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

LpSolution solve_lp(const LinearProgram& lp) {
  lp.Validate();
  const std::size_t n = lp.n_vars();

  // Map each variable onto nonnegative structural columns.
  std::vector<VarMap> vars(n);
  std::size_t n_struct = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, bound)
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower()[j], hi = lp.upper()[j];
    VarMap& v = vars[j];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.pos = static_cast<int>(n_struct++);
      if (std::isfinite(hi)) upper_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      v.pos = static_cast<int>(n_struct++);
    } else {
      v.pos = static_cast<int>(n_struct++);
      v.neg = static_cast<int>(n_struct++);
    }
  }

  std::vector<StdRow> rows;
  rows.reserve(lp.rows().size() + upper_rows.size());
  for (const auto& row : lp.rows()) {
    StdRow s{std::vector<double>(n_struct, 0.0), row.relation, row.b};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = row.a[j];
      if (a == 0.0) continue;
      s.b -= a * vars[j].offset;
      s.a[vars[j].pos] += a * vars[j].sign;
      if (vars[j].neg >= 0) s.a[vars[j].neg] -= a;
    }
    rows.push_back(std::move(s));
  }
  for (auto [col, bound] : upper_rows) {
    StdRow s{std::vector<double>(n_struct, 0.0), Relation::kLessEqual, bound};
    s.a[col] = 1.0;
    rows.push_back(std::move(s));
  }
  for (auto& s : rows) {
    if (s.b < 0.0) {
      for (double& v : s.a) v = -v;
      s.b = -s.b;
      if (s.rel == Relation::kLessEqual) {
        s.rel = Relation::kGreaterEqual;
      } else if (s.rel == Relation::kGreaterEqual) {
        s.rel = Relation::kLessEqual;
      }
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  const std::size_t m = rows.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& s : rows) {
    if (s.rel != Relation::kEqual) ++n_slack;
    if (s.rel != Relation::kLessEqual) ++n_art;
  }
  const std::size_t cols = n_struct + n_slack + n_art;
  Tableau tab(m, cols);
  std::size_t slack_col = n_struct, art_col = n_struct + n_slack;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& s = rows[r];
    for (std::size_t c = 0; c < n_struct; ++c) tab.at(r, c) = s.a[c];
    tab.rhs(r) = s.b;
    if (s.rel == Relation::kLessEqual) {
      tab.at(r, slack_col) = 1.0;
      tab.basis()[r] = slack_col++;
    } else {
      if (s.rel == Relation::kGreaterEqual) tab.at(r, slack_col++) = -1.0;
      tab.at(r, art_col) = 1.0;
      tab.basis()[r] = art_col++;
    }
  }
  const std::size_t art_begin = n_struct + n_slack;

  double rhs_scale = 1.0;
  for (const auto& s : rows) rhs_scale = std::max(rhs_scale, std::abs(s.b));

  if (n_art > 0) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t c = art_begin; c < cols; ++c) cost[c] = -1.0;
    std::vector<double> d = tab.ReducedCosts(cost);
    tab.Optimize(d);  // bounded below by zero
    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.basis()[r] >= art_begin) infeas += std::max(tab.rhs(r), 0.0);
    }
    if (infeas > 1e-9 * rhs_scale) {
      return LpSolution{LpStatus::kInfeasible, {}, 0.0};
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.basis()[r] < art_begin) continue;
      std::size_t best = cols;
      double best_abs = 1e-7;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(tab.at(r, c)) > best_abs) {
          best_abs = std::abs(tab.at(r, c));
          best = c;
        }
      }
      if (best < cols) {
        tab.rhs(r) = 0.0;
        tab.Pivot(r, best, d);
      }
      // Otherwise the row is redundant; its artificial stays basic at zero
      // and can never re-enter because artificials are disallowed below.
    }
    for (std::size_t c = art_begin; c < cols; ++c) tab.allowed()[c] = false;
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double cj = lp.objective()[j];
    cost[vars[j].pos] += cj * vars[j].sign;
    if (vars[j].neg >= 0) cost[vars[j].neg] -= cj;
  }
  std::vector<double> d = tab.ReducedCosts(cost);
  if (!tab.Optimize(d)) return LpSolution{LpStatus::kUnbounded, {}, 0.0};

  std::vector<double> col_value(cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    col_value[tab.basis()[r]] = std::max(tab.rhs(r), 0.0);
  }
  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = vars[j].offset + vars[j].sign * col_value[vars[j].pos];
    if (vars[j].neg >= 0) v -= col_value[vars[j].neg];
    sol.x[j] = v;
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.objective_value += lp.objective()[j] * sol.x[j];
  }
  const double viol = lp_max_violation(lp, sol.x);
  if (viol > 1e-7 * rhs_scale) {
    std::ostringstream os;
    os << "simplex solution violates constraints by " << viol;
    throw NumericalError(os.str());
  }
  return sol;
}

double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : lp.rows()) {
    double ax = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) ax += row.a[j] * x[j];
    double v = 0.0;
    switch (row.relation) {
      case Relation::kLessEqual: v = ax - row.b; break;
      case Relation::kGreaterEqual: v = row.b - ax; break;
      case Relation::kEqual: v = std::abs(ax - row.b); break;
    }
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lp.lower()[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper()[j]);
  }
  return worst;
}

double max_violation(const Matrix& A, const std::vector<double>& b,
                     const std::vector<double>& x) {
  if (A.rows() != b.size() || A.cols() != x.size()) {
    throw std::invalid_argument("max_violation: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double ax = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) ax += A(i, j) * x[j];
    worst = std::max(worst, ax - b[i]);
  }
  return worst;
}

std::size_t matrix_rank(const Matrix& A, double tol) {
  Matrix m = A;
  double scale = 0.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;
  const double eps = tol * scale;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    }
    if (std::abs(m(piv, c)) <= eps) continue;
    if (piv != rank) {
      for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(piv, k), m(rank, k));
    }
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      const double f = m(r, c) / m(rank, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(r, k) -= f * m(rank, k);
    }
    ++rank;
  }
  return rank;
}

double hoffman_constant(const Matrix& A) {
  const std::size_t rows = A.rows(), n = A.cols();
  if (rows > kHoffmanRowCap) {
    std::ostringstream os;
    os << "too many rows for exact Hoffman constant: " << rows << " > "
       << kHoffmanRowCap;
    throw std::invalid_argument(os.str());
  }
  if (rows == 0 || matrix_rank(A) == 0) {
    throw std::invalid_argument("Hoffman constant needs a nonzero matrix");
  }
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << rows); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < rows; ++i) {
      if (mask & (std::size_t{1} << i)) subset.push_back(i);
    }
    const std::size_t k = subset.size();
    if (k > n) continue;
    Matrix sub(k, n);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < n; ++c) sub(r, c) = A(subset[r], c);
    }
    if (matrix_rank(sub) < k) continue;

    // min sum_c s_c  s.t.  s_c >= +-(A_J^T v)_c,  sum v = 1,  v >= 0.
    LinearProgram lp(k + n);
    for (std::size_t c = 0; c < n; ++c) lp.objective()[k + c] = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<double> up(k + n, 0.0), dn(k + n, 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        up[r] = sub(r, c);
        dn[r] = -sub(r, c);
      }
      up[k + c] = -1.0;
      dn[k + c] = -1.0;
      lp.AddRow(std::move(up), Relation::kLessEqual, 0.0);
      lp.AddRow(std::move(dn), Relation::kLessEqual, 0.0);
    }
    std::vector<double> simplex(k + n, 0.0);
    for (std::size_t r = 0; r < k; ++r) simplex[r] = 1.0;
    lp.AddRow(std::move(simplex), Relation::kEqual, 1.0);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) {
      throw NumericalError("Hoffman subproblem failed to solve");
    }
    const double inner = -sol.objective_value;
    if (inner <= 0.0) {
      throw NumericalError("Hoffman subproblem returned a zero minimum");
    }
    best = std::max(best, 1.0 / inner);
  }
  return best;
}

}  // namespace fairrec

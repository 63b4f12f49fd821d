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

#ifndef FAIRREC_LP_H_
#define FAIRREC_LP_H_

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrec/matrix.h"

namespace fairrec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct LpRow {
  std::vector<double> a;
  Relation relation = Relation::kLessEqual;
  double b = 0.0;
};

// maximize c.x subject to rows and lower <= x <= upper. Bounds default to
// [0, +inf); a lower bound of -inf makes the variable free below.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t n_vars);

  std::size_t n_vars() const { return objective_.size(); }
  std::vector<double>& objective() { return objective_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  void AddRow(std::vector<double> a, Relation relation, double b);
  void SetBounds(std::size_t var, double lo, double hi);

  // Throws std::invalid_argument on non-finite data or ragged rows.
  void Validate() const;

  // Plain-text inequality listing for debugging.
  std::string Dump() const;

 private:
  std::vector<double> objective_;
  std::vector<LpRow> rows_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;  // filled only when optimal
  double objective_value = 0.0;
};

// Raised when the simplex hits a vanishing pivot, exceeds its iteration budget,
// or returns a point that fails the feasibility recheck.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense two-phase primal simplex. Entering column by largest reduced cost,
// switching to Bland's rule after a run of degenerate pivots; leaving row by
// minimum ratio with ties to the lowest basic index. Deterministic.
LpSolution solve_lp(const LinearProgram& lp);

// Largest constraint violation of x (rows and bounds), used by tests.
double lp_max_violation(const LinearProgram& lp, const std::vector<double>& x);

// ||(Ax - b)^+||_inf.
double max_violation(const Matrix& A, const std::vector<double>& b,
                     const std::vector<double>& x);

// Brute-force Hoffman constant: max over row subsets J with full row rank of
// 1 / min { ||A_J^T v||_1 : v >= 0, ||v||_1 = 1 }. Rows beyond the cap throw.
inline constexpr std::size_t kHoffmanRowCap = 12;
double hoffman_constant(const Matrix& A);

// Numerical rank by Gaussian elimination with partial pivoting.
std::size_t matrix_rank(const Matrix& A, double tol = 1e-10);

}  // namespace fairrec

#endif  // FAIRREC_LP_H_

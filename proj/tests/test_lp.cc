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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fairrec/lp.h"
#include "oracles.h"

using namespace fairrec;

TEST_CASE("single-variable LPs") {
  LinearProgram lp(1);
  lp.objective() = {1.0};
  lp.AddRow({1.0}, Relation::kLessEqual, 1.0);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(std::abs(s.x[0] - 1.0) < 1e-12);
  CHECK(std::abs(s.objective_value - 1.0) < 1e-12);

  LinearProgram bad(1);
  bad.objective() = {1.0};
  bad.AddRow({1.0}, Relation::kLessEqual, -1.0);
  CHECK(solve_lp(bad).status == LpStatus::kInfeasible);

  LinearProgram unb(1);
  unb.objective() = {1.0};
  unb.AddRow({1.0}, Relation::kGreaterEqual, 0.5);
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);
}

TEST_CASE("two-variable LP with an equality row") {
  LinearProgram lp(2);
  lp.objective() = {0.8, 0.6};
  lp.AddRow({1.0, 1.0}, Relation::kEqual, 1.0);
  lp.AddRow({1.0, 0.0}, Relation::kGreaterEqual, 0.25);
  lp.AddRow({0.0, 1.0}, Relation::kGreaterEqual, 0.25);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(std::abs(s.x[0] - 0.75) < 1e-9);
  CHECK(std::abs(s.x[1] - 0.25) < 1e-9);
  CHECK(std::abs(s.objective_value - 0.75) < 1e-9);
}

TEST_CASE("free and bounded variables") {
  LinearProgram lp(2);
  lp.objective() = {-1.0, 1.0};
  lp.SetBounds(0, -kInf, kInf);
  lp.SetBounds(1, 0.0, 2.0);
  lp.AddRow({1.0, 0.0}, Relation::kGreaterEqual, -3.0);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(std::abs(s.x[0] + 3.0) < 1e-9);
  CHECK(std::abs(s.x[1] - 2.0) < 1e-9);
}

TEST_CASE("malformed LPs are rejected") {
  LinearProgram lp(2);
  CHECK_THROWS_AS(lp.AddRow({1.0}, Relation::kEqual, 1.0), std::invalid_argument);
  lp.objective()[0] = std::nan("");
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}

TEST_CASE("solve_lp matches vertex enumeration on small LPs") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const std::size_t rows = 2 + trial % 3;
    LinearProgram lp(n);
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t k = 0; k < n; ++k) lp.objective()[k] = u(gen);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> a(n);
      for (double& v : a) v = u(gen);
      const double rhs = 0.2 + u(gen);
      lp.AddRow(a, Relation::kLessEqual, rhs);
      A.push_back(a);
      b.push_back(rhs);
    }
    // Box rows keep the polytope bounded for the oracle.
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> e(n, 0.0);
      e[k] = 1.0;
      lp.AddRow(e, Relation::kLessEqual, 3.0);
      A.push_back(e);
      b.push_back(3.0);
      e[k] = -1.0;
      A.push_back(e);
      b.push_back(0.0);
    }
    const double oracle = testing::vertex_enumeration_max(A, b, lp.objective());
    const LpSolution s = solve_lp(lp);
    if (!std::isfinite(oracle)) {
      CHECK(s.status == LpStatus::kInfeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(std::abs(s.objective_value - oracle) < 1e-6);
    CHECK(lp_max_violation(lp, s.x) < 1e-7);
  }
}

TEST_CASE("strong duality on random feasible bounded LPs") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> pos(0.1, 1.0), u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5, rows = 2 + trial % 4;
    // max c.x, A x <= b, x >= 0 with A > 0 and b > 0: feasible and bounded.
    Matrix A(rows, n);
    std::vector<double> b(rows), c(n);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < n; ++k) A(r, k) = pos(gen);
      b[r] = pos(gen);
    }
    for (double& v : c) v = u(gen);
    LinearProgram primal(n);
    primal.objective() = c;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = A.row(r);
      primal.AddRow({row.begin(), row.end()}, Relation::kLessEqual, b[r]);
    }
    // min b.u, A^T u >= c, u >= 0, written as a maximization of -b.u.
    LinearProgram dual(rows);
    for (std::size_t r = 0; r < rows; ++r) dual.objective()[r] = -b[r];
    for (std::size_t k = 0; k < n; ++k) {
      dual.AddRow(A.col(k), Relation::kGreaterEqual, c[k]);
    }
    const LpSolution ps = solve_lp(primal), ds = solve_lp(dual);
    REQUIRE(ps.status == LpStatus::kOptimal);
    REQUIRE(ds.status == LpStatus::kOptimal);
    CHECK(std::abs(ps.objective_value + ds.objective_value) < 1e-6);
  }
}

TEST_CASE("solves are deterministic") {
  LinearProgram lp(3);
  lp.objective() = {1.0, 1.0, 1.0};
  lp.AddRow({1.0, 1.0, 1.0}, Relation::kLessEqual, 1.0);
  lp.AddRow({1.0, 1.0, 0.0}, Relation::kLessEqual, 1.0);
  const LpSolution a = solve_lp(lp), b = solve_lp(lp);
  CHECK(a.x == b.x);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("max_violation") {
  CHECK(max_violation(Matrix::FromRows({{1.0}}), {0.0}, {3.0}) == 3.0);
  CHECK(max_violation(Matrix::FromRows({{1.0}}), {5.0}, {3.0}) == 0.0);
  CHECK(max_violation(Matrix::FromRows({{1.0, 1.0}, {-1.0, 0.0}}), {1.0, 0.0},
                      {1.0, 1.0}) == 1.0);
}

TEST_CASE("Hoffman constant on small matrices") {
  CHECK(std::abs(hoffman_constant(Matrix::FromRows({{1.0}})) - 1.0) < 1e-9);
  CHECK(std::abs(hoffman_constant(Matrix::FromRows({{1.0}, {-1.0}})) - 1.0) < 1e-9);
  CHECK(std::abs(hoffman_constant(Matrix::FromRows({{2.0}})) - 0.5) < 1e-9);
  CHECK_THROWS_AS(hoffman_constant(Matrix(kHoffmanRowCap + 1, 2, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("Hoffman constant scales inversely") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 2 + trial % 2, cols = 2 + (trial / 2) % 2;
    Matrix A(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) A(i, j) = u(gen);
    }
    const double c = 0.5 + 3.0 * (u(gen) + 1.0);
    const double h = hoffman_constant(A);
    CHECK(std::abs(hoffman_constant(A.Scaled(c)) - h / c) < 1e-7 * std::max(1.0, h));
  }
}

TEST_CASE("Hoffman constant of a single row is the reciprocal l1 norm") {
  const Matrix A = Matrix::FromRows({{0.5, -1.5, 2.0}});
  CHECK(std::abs(hoffman_constant(A) - 1.0 / 4.0) < 1e-9);
}

TEST_CASE("matrix rank") {
  CHECK(matrix_rank(Matrix::FromRows({{1.0, 2.0}, {2.0, 4.0}})) == 1);
  CHECK(matrix_rank(Matrix::FromRows({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})) == 2);
}

TEST_CASE("LP dump lists every row") {
  LinearProgram lp(2);
  lp.objective() = {1.0, 2.0};
  lp.AddRow({1.0, 1.0}, Relation::kEqual, 1.0);
  lp.AddRow({1.0, 0.0}, Relation::kGreaterEqual, 0.5);
  const std::string d = lp.Dump();
  CHECK(d.find(">=") != std::string::npos);
  CHECK(d.find("=") != std::string::npos);
}

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
#include "fairrec/harness.h"
#include "fairrec/instance.h"
#include "oracles.h"

using namespace fairrec;

namespace {

Instance example1() { return gen_example1_instance(4, 2, 0.1); }

double brute_revenue(const Policy& x, const Instance& t) {
  double v = 0.0;
  for (std::size_t i = 0; i < t.num_items(); ++i) {
    for (std::size_t j = 0; j < t.num_types(); ++j) {
      v += t.r()[i] * t.p()[j] * t.y()(i, j) * x(i, j);
    }
  }
  return v;
}

}  // namespace

TEST_CASE("expected revenue on the single-sided example") {
  const Instance t = example1();
  CHECK(expected_revenue(Policy::Deterministic(4, {1, 1}), t) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(expected_revenue(Policy::Deterministic(4, {0, 0}), t) ==
        doctest::Approx(1.0).epsilon(1e-8));
  const Policy u = Policy::Uniform(4, 2);
  CHECK(std::abs(expected_revenue(u, t) - 2.8) < 1e-8);
  CHECK(std::abs(expected_revenue(u, t) - brute_revenue(u, t)) < 1e-12);
}

TEST_CASE("expected revenue rejects mismatched shapes") {
  CHECK_THROWS_AS(expected_revenue(Policy::Uniform(3, 2), example1()),
                  std::invalid_argument);
}

TEST_CASE("expected revenue is linear in the policy") {
  std::mt19937_64 gen(5);
  for (int k = 0; k < 50; ++k) {
    const Instance t = testing::random_instance(gen, 4, 3);
    const Policy a = testing::random_policy(gen, 4, 3);
    const Policy b = testing::random_policy(gen, 4, 3);
    const double alpha = 0.37;
    Matrix mix(4, 3);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        mix(i, j) = alpha * a(i, j) + (1 - alpha) * b(i, j);
      }
    }
    const double lhs = expected_revenue(Policy(mix), t);
    const double rhs =
        alpha * expected_revenue(a, t) + (1 - alpha) * expected_revenue(b, t);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("item outcome matrices") {
  const Instance vis({0.3, 0.7}, Matrix(2, 2, 0.4), {1.0, 2.0});
  const Matrix L = item_outcome_matrix(vis, {ItemOutcome::kVisibility});
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(L(i, 0) == 0.3);
    CHECK(L(i, 1) == 0.7);
  }
  const Instance one({1.0}, Matrix(1, 1, 0.5), {2.0});
  CHECK(item_outcome_matrix(one, {ItemOutcome::kExpectedRevenue})(0, 0) == 1.0);
  const Matrix ms = item_outcome_matrix(example1(), {ItemOutcome::kMarketshare});
  CHECK(std::abs(ms(1, 0) - 0.5 * 0.1) < 1e-15);
}

TEST_CASE("user outcome models") {
  const Instance t({1.0}, Matrix::FromRows({{0.5}, {0.8}}), {1.0, 1.0});
  CHECK(user_outcome_matrix(t, {ItemOutcome::kVisibility, UserModel::kRawY})(1, 0) ==
        0.8);
  CHECK(user_outcome_matrix(t, {ItemOutcome::kVisibility,
                                UserModel::kValuationExp, 2.0})(0, 0) == 0.25);
  const double mnl =
      user_outcome_matrix(t, {ItemOutcome::kVisibility, UserModel::kMnl})(1, 0);
  // log(5) + Euler's constant to 17 digits.
  CHECK(std::abs(mnl - 2.1866535773356332) < 1e-12);
}

TEST_CASE("utilities reject y within 1e-15 of one") {
  CHECK_THROWS_AS(user_utility(1.0 - 1e-16, UserModel::kMnl, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(user_utility(1.0, UserModel::kProbit, 1.0), std::domain_error);
}

TEST_CASE("utilities are increasing in y for every model") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.001, 0.99);
  const UserModel models[] = {UserModel::kMnl, UserModel::kProbit,
                              UserModel::kValuationExp, UserModel::kRawY};
  for (UserModel model : models) {
    for (int k = 0; k < 500; ++k) {
      const double y = u(gen);
      const double y2 = std::min(y + 1e-4 + 0.005 * u(gen), 0.995);
      CHECK(user_utility(y2, model, 0.7) > user_utility(y, model, 0.7));
      CHECK(std::isfinite(user_utility(y, model, 0.7)));
    }
  }
}

TEST_CASE("probit utility matches numerical integration") {
  // E[max(V, 0)] for V ~ N(v, 2 sigma^2), with v = s * quantile(y).
  const double sigma = 0.8, y = 0.3;
  const double s = std::sqrt(2.0) * sigma;
  const double v = s * normal_quantile(y);
  double integral = 0.0;
  const double h = 1e-4;
  for (double z = 0.0; z < v + 12 * s; z += h) {
    const double a = (z - v) / s;
    integral += z * std::exp(-0.5 * a * a) / (s * std::sqrt(2 * M_PI)) * h;
  }
  CHECK(std::abs(user_utility(y, UserModel::kProbit, sigma) - integral) < 1e-5);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double q : {1e-8, 0.01, 0.2, 0.5, 0.77, 0.999, 1 - 1e-9}) {
    CHECK(std::abs(normal_cdf(normal_quantile(q)) - q) < 1e-9 * std::max(1.0, q));
  }
}

TEST_CASE("validate_instance reports violations") {
  CHECK(validate_instance({0.5, 0.5}, Matrix(2, 2, 0.3), {1.0, 1.0}).empty());
  const auto sum = validate_instance({0.6, 0.6}, Matrix(2, 2, 0.3), {1.0, 1.0});
  REQUIRE(sum.size() == 1);
  CHECK(sum[0] == "p sums to 1.2");
  Matrix y(2, 2, 0.3);
  y(1, 0) = 1.0;
  const auto open = validate_instance({0.5, 0.5}, y, {1.0, 1.0});
  REQUIRE(!open.empty());
  CHECK(open[0].find("y must be in open interval (0,1)") != std::string::npos);
  CHECK_THROWS_AS(Instance({0.6, 0.6}, Matrix(2, 2, 0.3), {1.0, 1.0}),
                  InvalidInstance);
  CHECK(!validate_instance({0.5, 0.5}, Matrix(2, 2, 0.3), {1.0, 0.0}).empty());
}

TEST_CASE("policy invariants") {
  CHECK_THROWS_AS(Policy(Matrix::FromRows({{0.5}, {0.6}})), std::invalid_argument);
  CHECK_THROWS_AS(Policy(Matrix::FromRows({{-0.1}, {1.1}})), std::invalid_argument);
  CHECK_NOTHROW(Policy(Matrix::FromRows({{0.5}, {0.5 + 5e-10}})));
}

TEST_CASE("config invariants") {
  OutcomeSpec bad{ItemOutcome::kVisibility, UserModel::kProbit, 0.0};
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  FairnessConfig f;
  f.delta_item = 1.5;
  CHECK_THROWS_AS(f.Validate(3), std::invalid_argument);
  FairnessConfig parity;
  parity.swf = SwfKind::kDemographicParity;
  parity.parity_group = {0, 1, 2};
  CHECK_THROWS_AS(parity.Validate(3), std::invalid_argument);
  parity.parity_group = {1};
  CHECK_NOTHROW(parity.Validate(3));
}

TEST_CASE("enum names round-trip") {
  for (auto k : {ItemOutcome::kVisibility, ItemOutcome::kMarketshare,
                 ItemOutcome::kExpectedRevenue}) {
    CHECK(parse_item_outcome(to_string(k)) == k);
  }
  for (auto k : {UserModel::kMnl, UserModel::kProbit, UserModel::kValuationExp,
                 UserModel::kRawY}) {
    CHECK(parse_user_model(to_string(k)) == k);
  }
  for (auto k : {SwfKind::kMaxmin, SwfKind::kKalaiSmorodinsky,
                 SwfKind::kHookerWilliams, SwfKind::kDemographicParity}) {
    CHECK(parse_swf_kind(to_string(k)) == k);
  }
}

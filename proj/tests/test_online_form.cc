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

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fairrec/fair_opt.h"
#include "fairrec/harness.h"
#include "fairrec/online_form.h"
#include "oracles.h"

using namespace fairrec;

namespace {

const OutcomeSpec kVisRaw{ItemOutcome::kVisibility, UserModel::kRawY, 1.0};

FairnessConfig deltas(double di, double du) {
  FairnessConfig c;
  c.delta_item = di;
  c.delta_user = du;
  return c;
}

Instance two_item() {
  return Instance({1.0}, Matrix::FromRows({{0.8}, {0.2}}), {1.0, 3.0});
}

SimTrajectory constant_trajectory(const Policy& x, std::size_t T) {
  SimTrajectory traj;
  for (std::size_t t = 0; t < T; ++t) traj.policies.push_back(x);
  return traj;
}

}  // namespace

TEST_CASE("exploration rate") {
  CHECK(epsilon_t(8, 1) == 0.125);
  for (std::size_t t : {1, 7, 1000}) {
    CHECK(std::abs(epsilon_t(1, t) - std::min(1.0, std::pow(t, -1.0 / 3.0))) < 1e-15);
  }
  CHECK(std::abs(epsilon_t(5, 1000) - 0.034199518933533936) < 1e-12);
}

TEST_CASE("schedule values") {
  const ScheduleValues v = schedule_values(1000, 3, 2, 100);
  CHECK(std::abs(v.gamma_p - 5.0 * std::sqrt(std::log(3000.0) / 100.0)) < 1e-12);
  // Quoted reference value 1.41475 carries five decimals of rounding.
  CHECK(std::abs(v.gamma_p - 1.41475) < 1e-4);
  const double logT = std::log(1000.0);
  CHECK(v.m == std::max(1.0, 100 / logT - std::sqrt(100 * logT / 2)));
  CHECK(std::abs(v.eta - 2 * logT * std::max(v.gamma_y, v.gamma_p)) < 1e-9);

  const Schedules scaled(1000, 3, 2, 0.25);
  CHECK(std::abs(scaled.at(100).gamma_p - 0.25 * v.gamma_p) < 1e-12);
  CHECK(std::abs(scaled.eta(100) - 0.25 * v.eta) < 1e-9);

  const Schedules windowed(1000, 3, 2, 1.0, std::size_t{50});
  CHECK(std::abs(windowed.at(400).gamma_p -
                 5.0 * std::sqrt(std::log(3000.0)) / std::sqrt(50.0)) < 1e-12);
}

TEST_CASE("radii shrink and the cutoff lies inside the horizon") {
  const Schedules s(100000, 5, 3);
  CHECK(s.at(50000).gamma_p < s.at(5000).gamma_p);
  CHECK(s.at(50000).gamma_y < s.at(5000).gamma_y);
  const auto c = Schedules(1000000, 2, 1, 1e-3).cutoff(0.6, 1.0);
  REQUIRE(c.has_value());
  CHECK(*c <= 1000000);
}

TEST_CASE("single-sample IPW updates") {
  EstimatorState a(2, 1);
  a.Update(0, 0, true, 0.5);
  CHECK(a.y_hat()(0, 0) == 2.0);
  EstimatorState b(2, 1);
  b.Update(0, 0, false, 0.5);
  CHECK(b.y_hat()(0, 0) == 0.0);
  CHECK_THROWS_AS(b.Update(0, 1, true, 0.0), std::invalid_argument);
}

TEST_CASE("initial estimates") {
  EstimatorState s(3, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(s.y_hat()(i, j) == 0.5);
  }
  for (double v : s.p_hat()) CHECK(v == 0.25);
}

TEST_CASE("arrival frequencies") {
  EstimatorState s(2, 2);
  for (std::size_t j : {0, 0, 1, 0}) s.Update(j, 0, false, 1.0);
  CHECK(s.p_hat()[0] == 0.75);
  CHECK(s.p_hat()[1] == 0.25);
  CHECK(s.t() == 4);

  EstimatorState w(2, 2, std::size_t{2});
  for (std::size_t j : {0, 0, 1, 1}) w.Update(j, 0, false, 1.0);
  CHECK(w.p_hat()[0] == 0.0);
  CHECK(w.p_hat()[1] == 1.0);
}

TEST_CASE("update_estimates reads the offer probability from the policy") {
  EstimatorState s(2, 1);
  update_estimates(s, 0, 1, true, Policy(Matrix::FromRows({{0.75}, {0.25}})));
  CHECK(s.y_hat()(1, 0) == 4.0);
  EstimatorState z(2, 1);
  CHECK_THROWS_AS(
      update_estimates(z, 0, 1, true, Policy::Deterministic(2, {0})),
      std::invalid_argument);
}

TEST_CASE("IPW estimates are unbiased under a fixed policy") {
  const double y = 0.3, x = 0.4;
  const int runs = 400, arrivals = 200;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    EstimatorState s(2, 1);
    for (int k = 0; k < arrivals; ++k) {
      const std::size_t item = u(gen) < x ? 0 : 1;
      const bool buy = u(gen) < (item == 0 ? y : 0.5);
      s.Update(0, item, buy, item == 0 ? x : 1 - x);
    }
    sum += s.y_hat()(0, 0);
    sum_sq += s.y_hat()(0, 0) * s.y_hat()(0, 0);
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum_sq / runs - mean * mean) / (runs - 1));
  CHECK(std::abs(mean - y) <= 3 * se);
}

TEST_CASE("good event") {
  const Instance t({0.5, 0.5}, Matrix(2, 2, 0.3), {1.0, 1.0});
  const std::size_t T = 1000000;
  CHECK(good_event_holds(t.y(), t.p(), t, T, T));
  const double d = schedule_values(T, 2, 2, T).gamma_p + 0.01;
  CHECK_FALSE(good_event_holds(t.y(), {0.5 + d / 2, 0.5 - d / 2}, t, T, T));
}

TEST_CASE("periodic arrivals") {
  const ArrivalProcess a({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(a.at(1)[0] == 1.0);
  CHECK(a.at(2)[1] == 1.0);
  CHECK(a.at(3)[0] == 1.0);
  const auto avg = a.time_average(4);
  CHECK(avg[0] == 0.5);
  CHECK(avg[1] == 0.5);
}

TEST_CASE("full exploration gives the uniform policy") {
  const Instance t = two_item();
  EstimatorState s(2, 1);
  const Schedules sched(100, 2, 1);
  const FormDecision d = form_decide(s, sched, 1, t.r(), kVisRaw, deltas(0.5, 0.0));
  CHECK_FALSE(d.fallback);
  CHECK(d.eps == 0.5);
  CHECK(d.x(0, 0) == 0.5);
  CHECK(d.x(1, 0) == 0.5);
}

TEST_CASE("vacuous constraints give the perturbed revenue maximizer") {
  const Instance t = two_item();
  EstimatorState s(2, 1);
  const Schedules sched(100000, 2, 1, 1e6);
  const std::size_t round = 5000;
  const FormDecision d =
      form_decide(s, sched, round, t.r(), kVisRaw, deltas(1.0, 1.0));
  REQUIRE_FALSE(d.fallback);
  // The estimate has y = 1/2 everywhere, so item 1 (r = 3) maximizes revenue.
  const double eps = epsilon_t(2, round);
  CHECK(std::abs(d.x(1, 0) - ((1 - 2 * eps) + eps)) < 1e-12);
  CHECK(std::abs(d.x(0, 0) - eps) < 1e-12);
}

TEST_CASE("estimates at or above one trigger the uniform fallback") {
  const Instance t = two_item();
  EstimatorState s(2, 1);
  s.Update(0, 0, true, 0.5);
  const FormDecision d =
      form_decide(s, Schedules(1000, 2, 1), 50, t.r(), kVisRaw, deltas(0.5, 0.0));
  CHECK(d.fallback);
  CHECK(d.x(0, 0) == 0.5);
}

TEST_CASE("trajectories respect the exploration floor and column sums") {
  std::mt19937_64 gen(4);
  const Instance t = testing::random_instance(gen, 4, 3, 0.05, 0.6);
  const SimTrajectory traj = run_form(t, kVisRaw, deltas(0.5, 0.5), 2000, 9, {1e-4});
  REQUIRE(traj.policies.size() == 2000);
  for (std::size_t k = 0; k < traj.policies.size(); ++k) {
    const Policy& x = traj.policies[k];
    const double eps = epsilon_t(4, k + 1);
    for (std::size_t j = 0; j < 3; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(x(i, j) >= eps - 1e-15);
        col += x(i, j);
      }
      CHECK(std::abs(col - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("single-round and degenerate runs") {
  const SimTrajectory one = run_form(two_item(), kVisRaw, deltas(0, 0), 1, 3);
  CHECK(one.rounds.size() == 1);
  const Instance single({1.0}, Matrix(1, 1, 0.4), {2.0});
  const SimTrajectory traj = run_form(single, kVisRaw, deltas(0.5, 0.5), 300, 3);
  for (const Policy& x : traj.policies) CHECK(x(0, 0) == 1.0);
  CHECK(revenue_regret(traj, single, Policy::Uniform(1, 1)) == 0.0);
}

TEST_CASE("runs are deterministic per seed") {
  std::mt19937_64 gen(6);
  const Instance t = testing::random_instance(gen, 3, 2, 0.05, 0.6);
  std::ostringstream a, b, c;
  write_trajectory_csv(a, run_form(t, kVisRaw, deltas(0.5, 0.5), 500, 42, {1e-4}));
  write_trajectory_csv(b, run_form(t, kVisRaw, deltas(0.5, 0.5), 500, 42, {1e-4}));
  write_trajectory_csv(c, run_form(t, kVisRaw, deltas(0.5, 0.5), 500, 43, {1e-4}));
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
  CHECK(a.str().rfind("t,J_t,I_t,z_t,rev_inst,item_violation_max,"
                      "user_violation_max,fallback,eta_t,eps_t\n",
                      0) == 0);
}

TEST_CASE("regret of constant trajectories") {
  const Instance t = two_item();
  const FairSolveResult star = solve_fair(t, kVisRaw, deltas(0.5, 0.0));
  CHECK(revenue_regret(constant_trajectory(star.policy, 10), t, star.policy) == 0.0);

  const FairTargets half = fair_targets(t, kVisRaw, deltas(0.5, 0.0));
  CHECK(fairness_regret(constant_trajectory(Policy::Uniform(2, 1), 10), t, kVisRaw,
                        half.item_fair, half.user_fair, deltas(0.5, 0.0)) == 0.0);

  const FairTargets full = fair_targets(t, kVisRaw, deltas(1.0, 0.0));
  const double fr =
      fairness_regret(constant_trajectory(opt_rev(t).policy, 10), t, kVisRaw,
                      full.item_fair, full.user_fair, deltas(1.0, 0.0));
  CHECK(std::abs(fr - 0.5) < 1e-9);
}

TEST_CASE("recorded metrics agree with recomputation") {
  std::mt19937_64 gen(10);
  const Instance t = testing::random_instance(gen, 3, 2, 0.05, 0.6);
  const FairnessConfig c = deltas(0.5, 0.5);
  const SimTrajectory traj = run_form(t, kVisRaw, c, 1500, 5, {1e-4});
  const FairTargets targets = fair_targets(t, kVisRaw, c);
  CHECK(std::abs(fairness_regret(traj) - fairness_regret(traj, t, kVisRaw,
                                                         targets.item_fair,
                                                         targets.user_fair, c)) <
        1e-12);
  const FairSolveResult star = solve_fair(t, kVisRaw, c);
  REQUIRE(star.status == LpStatus::kOptimal);
  const auto curve = revenue_regret_curve(traj, star.fair_rev);
  CHECK(std::abs(curve.back() - revenue_regret(traj, t, star.policy)) < 1e-9);
  const auto fcurve = fairness_regret_curve(traj);
  CHECK(std::abs(fcurve.back() - fairness_regret(traj)) < 1e-12);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(gen);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

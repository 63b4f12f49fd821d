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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fairrec/assortment.h"
#include "fairrec/harness.h"
#include "fairrec/rng.h"

using namespace fairrec;

namespace {

const OutcomeSpec kVisRaw{ItemOutcome::kVisibility, UserModel::kRawY, 1.0};

FairnessConfig deltas(double di, double du) {
  FairnessConfig c;
  c.delta_item = di;
  c.delta_user = du;
  return c;
}

AssortInstance random_assort(std::mt19937_64& gen, std::size_t n, std::size_t m,
                             std::size_t K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(m, 1.0 / static_cast<double>(m));
  Matrix w(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) w(i, j) = 0.1 + 1.9 * u(gen);
  }
  std::vector<double> r(n);
  for (double& v : r) v = 0.5 + u(gen);
  return AssortInstance(p, w, r, K, 1e-9);
}

// Exhaustive scan over every subset of size 1..K, built from bitmasks so it
// shares no code with the enumeration under test.
double brute_force_revenue(const AssortInstance& t) {
  const std::size_t n = t.num_items();
  double total = 0.0;
  for (std::size_t j = 0; j < t.num_types(); ++j) {
    double best = 0.0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > t.K()) continue;
      double num = 0.0, den = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          num += t.r()[i] * t.w()(i, j);
          den += t.w()(i, j);
        }
      }
      best = std::max(best, num / den);
    }
    total += t.p()[j] * best;
  }
  return total;
}

}  // namespace

TEST_CASE("MNL choice probabilities") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const ChoiceProbs a = mnl_choice_probs({0, 1}, ones);
  CHECK(std::abs(a.item[0] - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(a.none - 1.0 / 3.0) < 1e-15);
  const std::vector<double> big = {1e9, 1.0};
  CHECK(mnl_choice_probs({0}, big).item[0] > 1 - 1e-8);
  const std::vector<double> w = {1.0, 2.0, 3.0};
  const ChoiceProbs c = mnl_choice_probs({0, 1, 2}, w);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(c.item[k] - (k + 1) / 7.0) < 1e-15);
  }
  CHECK(std::abs(c.none - 1.0 / 7.0) < 1e-15);
  CHECK_THROWS(mnl_choice_probs({}, w));
}

TEST_CASE("MNL probabilities sum to one") {
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> w(6);
    for (double& v : w) v = u(gen);
    Assortment S;
    for (std::size_t i = 0; i < 6; ++i) {
      if (gen() % 2 || (S.empty() && i == 5)) S.push_back(i);
    }
    const ChoiceProbs c = mnl_choice_probs(S, w);
    double s = c.none;
    for (double v : c.item) s += v;
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("assortment enumeration") {
  const auto one = enumerate_assortments(3, 1);
  REQUIRE(one.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(one[i] == Assortment{i});
  const auto two = enumerate_assortments(3, 2);
  CHECK(two.size() == 6);
  CHECK(two[1] == Assortment{0, 1});
  CHECK(enumerate_assortments(10, 3).size() == 175);
  CHECK(assortment_count(10, 3) == 175);
  CHECK(assortment_count(4, 9) == 15);
  try {
    enumerate_assortments(40, 5);
    FAIL("expected the cap error");
  } catch (const std::length_error& e) {
    CHECK(std::string(e.what()).find(std::to_string(assortment_count(40, 5))) !=
          std::string::npos);
  }
  const auto all = enumerate_assortments(6, 3);
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("sampled choices follow the MNL probabilities") {
  const std::vector<double> w = {1.0, 2.0, 3.0};
  Rng rng(5, 2);
  std::map<std::size_t, int> counts;
  const int draws = 70000;
  for (int k = 0; k < draws; ++k) ++counts[sample_choice({0, 2}, w, 3, rng)];
  CHECK(counts.count(1) == 0);
  CHECK(std::abs(counts[0] / double(draws) - 0.2) < 0.01);
  CHECK(std::abs(counts[2] / double(draws) - 0.6) < 0.01);
  CHECK(std::abs(counts[3] / double(draws) - 0.2) < 0.01);
}

TEST_CASE("unconstrained assortment LP matches an exhaustive scan") {
  std::mt19937_64 gen(29);
  for (int k = 0; k < 10; ++k) {
    const AssortInstance t = random_assort(gen, 5, 2, 2);
    const AssortSolveResult s = solve_fair_assort(t, kVisRaw, deltas(0, 0), 0.0);
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(std::abs(s.revenue - brute_force_revenue(t)) < 1e-6);
    CHECK(std::abs(assort_revenue(t, s.policy) - s.revenue) < 1e-9);
  }
}

TEST_CASE("single item, single slot") {
  const AssortInstance t({1.0}, Matrix(1, 1, 0.7), {2.0}, 1);
  const AssortSolveResult s = solve_fair_assort(t, kVisRaw, deltas(1, 1), 0.0);
  REQUIRE(s.status == LpStatus::kOptimal);
  REQUIRE(s.policy.sets.size() == 1);
  CHECK(std::abs(s.policy.q(0, 0) - 1.0) < 1e-9);
}

TEST_CASE("full item fairness on visibility reaches the maxmin level") {
  std::mt19937_64 gen(31);
  for (int k = 0; k < 5; ++k) {
    const AssortInstance t = random_assort(gen, 4, 2, 2);
    const AssortSolveResult s = solve_fair_assort(t, kVisRaw, deltas(1, 0), 0.0);
    REQUIRE(s.status == LpStatus::kOptimal);
    const LinearOutcomes item =
        assort_item_outcomes(t, s.policy.sets, ItemOutcome::kVisibility);
    const auto vis = assort_item_values(item, s.policy.q);
    // Visibilities sum to at most K, so K/N is the best minimum and the
    // uniform distribution over size-K sets attains it.
    CHECK(std::abs(*std::min_element(vis.begin(), vis.end()) - 0.5) < 1e-6);
  }
}

TEST_CASE("user-fair assortments take the top weights") {
  const AssortInstance t({0.5, 0.5}, Matrix::FromRows({{0.3, 2.0}, {1.5, 0.2},
                                                        {1.0, 1.0}}),
                         {1.0, 1.0, 1.0}, 2);
  const auto sets = enumerate_assortments(3, 2);
  const auto pick = user_fair_assortments(t, sets);
  CHECK(sets[pick[0]] == Assortment{1, 2});
  CHECK(sets[pick[1]] == Assortment{0, 2});
}

TEST_CASE("epoch estimates are unbiased for a fixed assortment") {
  const std::vector<double> w = {0.4, 1.2, 0.7};
  const Assortment S = {0, 1, 2};
  EpochEstimator est(3, 1);
  Rng rng(13, 2);
  std::vector<std::vector<double>> per_epoch(3);
  std::vector<double> tally(3, 0.0);
  while (est.epochs()[0] < 400) {
    const std::size_t c = sample_choice(S, w, 3, rng);
    const bool closed = est.Observe(0, S, c);
    if (c < 3) {
      tally[c] += 1.0;
    } else {
      CHECK(closed);
      for (std::size_t i = 0; i < 3; ++i) per_epoch[i].push_back(tally[i]);
      std::fill(tally.begin(), tally.end(), 0.0);
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& v = per_epoch[i];
    double mean = 0.0, sq = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    for (double x : v) sq += (x - mean) * (x - mean);
    const double se = std::sqrt(sq / (v.size() - 1) / v.size());
    CHECK(std::abs(est.w_hat()(i, 0) - mean) < 1e-12);
    CHECK(std::abs(mean - w[i]) <= 3 * se);
  }
}

TEST_CASE("epoch estimator bookkeeping") {
  EpochEstimator est(3, 2);
  CHECK(est.w_hat()(0, 0) == 0.5);
  CHECK_FALSE(est.Observe(1, {0, 2}, 2));
  CHECK(est.Observe(1, {0, 2}, 3));
  CHECK(est.w_hat()(2, 1) == 1.0);
  CHECK(est.w_hat()(0, 1) == 0.0);
  // Items not shown keep their previous estimate.
  CHECK(est.w_hat()(1, 1) == 0.5);
  const AssortInstance e = est.Estimate({1.0, 1.0, 1.0}, 2);
  CHECK(e.w()(0, 1) == kWeightFloor);
}

TEST_CASE("online assortment runs") {
  std::mt19937_64 gen(37);
  const AssortInstance t = random_assort(gen, 4, 2, 2);
  const SimTrajectory one = run_form_assort(t, kVisRaw, deltas(0.5, 0.5), 1, 1);
  REQUIRE(one.rounds.size() == 1);
  CHECK(!one.rounds[0].offered_set.empty());
  CHECK(one.rounds[0].offered_set.size() <= 2);

  std::ostringstream a, b;
  write_trajectory_csv(a, run_form_assort(t, kVisRaw, deltas(0.5, 0.5), 400, 7));
  write_trajectory_csv(b, run_form_assort(t, kVisRaw, deltas(0.5, 0.5), 400, 7));
  CHECK(a.str() == b.str());
  CHECK(a.str().find(",offered_set\n") != std::string::npos);
}

TEST_CASE("unconstrained online assortments settle on the best set") {
  const AssortInstance t({1.0}, Matrix::FromRows({{1.0}, {0.5}}), {1.0, 4.0}, 2);
  // Revenue: {0} 0.5, {1} 4/3, {0,1} 1.2, so {1} is the unique optimum.
  CHECK(std::abs(brute_force_revenue(t) - 4.0 / 3.0) < 1e-12);
  const SimTrajectory traj =
      run_form_assort(t, kVisRaw, deltas(0, 0), 20000, 3, {1e-4});
  std::size_t good = 0, late = 0;
  for (std::size_t k = traj.rounds.size() / 2; k < traj.rounds.size(); ++k) {
    ++late;
    if (traj.rounds[k].offered_set == Assortment{1}) ++good;
  }
  CHECK(good * 2 > late);
}

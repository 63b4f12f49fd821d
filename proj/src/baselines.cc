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

#include "fairrec/baselines.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fairrec/fair_opt.h"

namespace fairrec {

std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::kGreedy: return "greedy";
    case BaselineKind::kMaxUtility: return "max_utility";
    case BaselineKind::kMinRevenue: return "min_revenue";
    case BaselineKind::kRandom: return "random";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(const std::string& s) {
  if (s == "greedy") return BaselineKind::kGreedy;
  if (s == "max_utility") return BaselineKind::kMaxUtility;
  if (s == "min_revenue") return BaselineKind::kMinRevenue;
  if (s == "random") return BaselineKind::kRandom;
  throw std::invalid_argument("unknown baseline kind: " + s);
}

namespace {

// Utility ranking keeps IPW estimates inside the utility's domain.
constexpr double kUtilityYCap = 1.0 - 1e-9;

Assortment top_k(const std::vector<double>& score, std::size_t k,
                 bool ascending) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? score[a] < score[b] : score[a] > score[b];
  });
  Assortment out(idx.begin(), idx.begin() + static_cast<long>(k));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Assortment baseline_policy(BaselineKind kind, const BaselineView& view,
                           std::size_t type, std::size_t K, Rng& rng) {
  const std::size_t n = view.r->size();
  const std::size_t k = std::min(K, n);
  if (k == 0) throw std::invalid_argument("K must be >= 1");
  std::vector<double> score(n);
  switch (kind) {
    case BaselineKind::kGreedy:
      // The arrival-rate factor is common to all items of the type.
      for (std::size_t i = 0; i < n; ++i) {
        score[i] = (*view.r)[i] * (*view.estimate)(i, type);
      }
      return top_k(score, k, false);
    case BaselineKind::kMaxUtility:
      for (std::size_t i = 0; i < n; ++i) {
        const double e = (*view.estimate)(i, type);
        score[i] = view.assortment
                       ? e
                       : user_utility(std::clamp(e, 0.0, kUtilityYCap),
                                      view.user_model, view.user_param);
      }
      return top_k(score, k, false);
    case BaselineKind::kMinRevenue:
      return top_k(*view.realized_revenue, k, true);
    case BaselineKind::kRandom: {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t b = a + rng.UniformIndex(n - a);
        std::swap(idx[a], idx[b]);
      }
      Assortment out(idx.begin(), idx.begin() + static_cast<long>(k));
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

SimTrajectory run_baseline(BaselineKind kind, const Instance& theta_true,
                           const OutcomeSpec& spec, const FairnessConfig& cfg,
                           std::size_t T, std::uint64_t seed) {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  const std::size_t n = theta_true.num_items(), m = theta_true.num_types();
  const FairTargets targets = fair_targets(theta_true, spec, cfg);

  SimTrajectory traj;
  traj.seed = seed;
  traj.algorithm = to_string(kind);
  traj.item_rhs = targets.item_rhs;
  traj.user_rhs = targets.user_rhs;
  traj.realized_item_revenue.assign(n, 0.0);
  traj.rounds.reserve(T);
  traj.policies.reserve(T);

  RngStreams rng(seed);
  EstimatorState state(n, m, std::nullopt, /*prior_until_offered=*/true);
  const BaselineView view{&state.y_hat(), &theta_true.r(),
                          &traj.realized_item_revenue, false,
                          spec.user_model, spec.user_param};
  const double offer_prob =
      kind == BaselineKind::kRandom ? 1.0 / static_cast<double>(n) : 1.0;

  for (std::size_t t = 1; t <= T; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.estimate_hash = state.Hash();
    rec.arrival = rng.arrivals.Categorical(theta_true.p());
    const std::size_t J = rec.arrival;

    Policy x = Policy::Uniform(n, m);
    std::size_t item = 0;
    if (kind == BaselineKind::kRandom) {
      item = baseline_policy(kind, view, J, 1, rng.items).front();
    } else {
      std::vector<std::size_t> choice(m);
      for (std::size_t j = 0; j < m; ++j) {
        choice[j] = baseline_policy(kind, view, j, 1, rng.items).front();
      }
      x = Policy::Deterministic(n, choice);
      item = choice[J];
    }
    rec.item = static_cast<long>(item);
    rec.purchase = rng.purchases.Bernoulli(theta_true.y()(item, J));
    if (rec.purchase) traj.realized_item_revenue[item] += theta_true.r()[item];
    state.Update(J, item, rec.purchase, offer_prob);
    record_policy_metrics(traj, rec, x, theta_true, targets);
    traj.policies.push_back(std::move(x));
    traj.rounds.push_back(std::move(rec));
  }
  return traj;
}

SimTrajectory run_baseline_assort(BaselineKind kind,
                                  const AssortInstance& theta_true,
                                  const OutcomeSpec& spec,
                                  const FairnessConfig& cfg, std::size_t T,
                                  std::uint64_t seed) {
  if (T == 0) throw std::invalid_argument("T must be >= 1");
  const std::size_t n = theta_true.num_items(), m = theta_true.num_types();
  const std::size_t k = std::min(theta_true.K(), n);
  const auto sets = enumerate_assortments(n, theta_true.K());
  const std::size_t ns = sets.size();
  const AssortTargets targets = assort_targets(theta_true, sets, spec, cfg);

  SimTrajectory traj;
  traj.seed = seed;
  traj.algorithm = to_string(kind);
  traj.assortment = true;
  traj.item_rhs = targets.item_rhs;
  traj.user_rhs = targets.user_rhs;
  traj.realized_item_revenue.assign(n, 0.0);
  traj.rounds.reserve(T);

  RngStreams rng(seed);
  EpochEstimator est(n, m);
  const BaselineView view{&est.w_hat(), &theta_true.r(),
                          &traj.realized_item_revenue, true,
                          spec.user_model, spec.user_param};
  auto index_of = [&sets](const Assortment& s) {
    return static_cast<std::size_t>(
        std::lower_bound(sets.begin(), sets.end(), s) - sets.begin());
  };

  // Metric distribution: one-hot on the current offer, or uniform over all
  // size-k sets for the random baseline.
  Matrix q(m, ns, 0.0);
  std::vector<std::size_t> current(m);
  if (kind == BaselineKind::kRandom) {
    std::size_t full = 0;
    for (const auto& s : sets) full += s.size() == k ? 1 : 0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t s = 0; s < ns; ++s) {
        q(j, s) = sets[s].size() == k ? 1.0 / static_cast<double>(full) : 0.0;
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    current[j] = index_of(baseline_policy(kind, view, j, k, rng.items));
    if (kind != BaselineKind::kRandom) q(j, current[j]) = 1.0;
  }
  AssortMetricCache cache = assort_metrics(theta_true, sets, targets, q);

  for (std::size_t t = 1; t <= T; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.estimate_hash = est.Hash();
    const std::size_t J = rng.arrivals.Categorical(theta_true.p());
    rec.arrival = J;
    const Assortment& S = sets[current[J]];
    rec.offered_set = S;
    const std::size_t choice =
        sample_choice(S, theta_true.w().col(J), n, rng.purchases);
    rec.purchase = choice < n;
    rec.item = rec.purchase ? static_cast<long>(choice) : -1;
    if (rec.purchase) traj.realized_item_revenue[choice] += theta_true.r()[choice];
    record_assort_metrics(traj, rec, cache);
    traj.rounds.push_back(std::move(rec));

    if (!est.Observe(J, S, choice)) continue;
    const std::size_t next =
        index_of(baseline_policy(kind, view, J, k, rng.items));
    if (kind != BaselineKind::kRandom && next != current[J]) {
      q(J, current[J]) = 0.0;
      q(J, next) = 1.0;
      cache = assort_metrics(theta_true, sets, targets, q);
    }
    current[J] = next;
  }
  return traj;
}

}  // namespace fairrec

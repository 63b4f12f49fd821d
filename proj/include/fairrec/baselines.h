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

// Non-fair comparison policies run through the same simulation loop,
// estimators and random streams as the fair online algorithm.

#ifndef FAIRREC_BASELINES_H_
#define FAIRREC_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairrec/assortment.h"
#include "fairrec/instance.h"
#include "fairrec/matrix.h"
#include "fairrec/online_form.h"
#include "fairrec/rng.h"

namespace fairrec {

enum class BaselineKind { kGreedy, kMaxUtility, kMinRevenue, kRandom };

std::string to_string(BaselineKind k);
BaselineKind parse_baseline_kind(const std::string& s);

// What a baseline sees when choosing an offer for one user type.
struct BaselineView {
  const Matrix* estimate = nullptr;  // y-hat (single item) or w-hat (assortment)
  const std::vector<double>* r = nullptr;
  const std::vector<double>* realized_revenue = nullptr;
  bool assortment = false;
  UserModel user_model = UserModel::kRawY;
  double user_param = 1.0;
};

// Sorted item set of size min(K, N) offered to `type`. Greedy ranks by
// estimated expected revenue, max-utility by estimated user utility,
// min-revenue ascending by realized revenue; ties go to the lower index.
// Random draws a uniform subset from `rng`.
Assortment baseline_policy(BaselineKind kind, const BaselineView& view,
                           std::size_t type, std::size_t K, Rng& rng);

// Single-item mode (K = 1) on a purchase-probability instance.
SimTrajectory run_baseline(BaselineKind kind, const Instance& theta_true,
                           const OutcomeSpec& spec, const FairnessConfig& cfg,
                           std::size_t T, std::uint64_t seed);

// Assortment mode with epoch-based weight estimates; offers are revised when
// an epoch of the arriving type closes.
SimTrajectory run_baseline_assort(BaselineKind kind,
                                  const AssortInstance& theta_true,
                                  const OutcomeSpec& spec,
                                  const FairnessConfig& cfg, std::size_t T,
                                  std::uint64_t seed);

}  // namespace fairrec

#endif  // FAIRREC_BASELINES_H_

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

// Single-sided fair solutions. Item-fair policies come from social-welfare
// LPs over a product of probability simplices; the user-fair policy is the
// per-type utility argmax.

#ifndef FAIRREC_FAIR_SOLUTIONS_H_
#define FAIRREC_FAIR_SOLUTIONS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fairrec/instance.h"
#include "fairrec/matrix.h"

namespace fairrec {

// Stakeholder outcomes that are linear in a decision vector made of disjoint
// probability simplices ("groups"). Row s of `coef` gives outcome s.
//
// The single-item policy x (N x M) is the case with one group per user type
// and variable index i * M + j; the assortment policy q uses one group per
// user type over all enumerated assortments.
struct LinearOutcomes {
  Matrix coef;
  std::vector<std::vector<std::size_t>> groups;

  std::size_t n_vars() const { return coef.cols(); }
  std::size_t n_stakeholders() const { return coef.rows(); }
  // Largest outcome stakeholder s can get: sum over groups of the best
  // coefficient in the group.
  double max_attainable(std::size_t s) const;
};

LinearOutcomes single_item_outcomes(const Matrix& L);
Policy policy_from_vector(std::span<const double> v, std::size_t n,
                          std::size_t m);

// Maximizes the configured item SWF, then (holding the SWF value within
// 1e-8 relative) maximizes total outcome. Returns the decision vector with
// every group summing to exactly 1.
std::vector<double> solve_item_fair(const LinearOutcomes& outcomes,
                                    const FairnessConfig& cfg);

Policy item_fair_maxmin(const Matrix& L);
Policy item_fair_ks(const Matrix& L);
Policy item_fair_hw(const Matrix& L, double delta);
Policy item_fair_parity(const Matrix& L, const std::vector<std::size_t>& group);
Policy item_fair_solution(const Matrix& L, const FairnessConfig& cfg);

// One-hot per column on argmax_i U_ij, ties to the lowest index.
Policy user_fair_solution(const Matrix& U);

enum class SwfEval { kMaxmin, kKalaiSmorodinsky, kHookerWilliams, kNash,
                     kDemographicParity };

struct SwfParams {
  double hw_delta = 0.0;
  std::vector<std::size_t> parity_group;
  std::vector<double> ks_max;  // per-stakeholder maximum outcomes
};

// Welfare of an outcome vector. K-S returns the outcome sum on the
// proportional ray and -inf elsewhere; Nash throws on a zero outcome.
double swf_value(std::span<const double> outcomes, SwfEval kind,
                 const SwfParams& params = {});

}  // namespace fairrec

#endif  // FAIRREC_FAIR_SOLUTIONS_H_

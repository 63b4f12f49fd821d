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

// Assortment recommendation under the MNL choice model: enumeration of
// candidate assortments, the fairness-constrained LP over assortment
// distributions, and the epoch-based online learner.

#ifndef FAIRREC_ASSORTMENT_H_
#define FAIRREC_ASSORTMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairrec/fair_solutions.h"
#include "fairrec/instance.h"
#include "fairrec/lp.h"
#include "fairrec/matrix.h"
#include "fairrec/online_form.h"
#include "fairrec/rng.h"

namespace fairrec {

inline constexpr std::size_t kAssortmentCap = 200000;
inline constexpr double kWeightFloor = 1e-6;
inline constexpr double kWeightCeil = 1e6;

// Sorted 0-based item indices.
using Assortment = std::vector<std::size_t>;

class AssortInstance {
 public:
  AssortInstance() = default;
  // Throws InvalidInstance listing every violation.
  AssortInstance(std::vector<double> p, Matrix w, std::vector<double> r,
                 std::size_t K, double sum_tol = kArrivalSumTol);
  // Estimated weights and arrival rates; dimensions checked only.
  static AssortInstance Estimated(std::vector<double> p, Matrix w,
                                  std::vector<double> r, std::size_t K);

  std::size_t num_items() const { return r_.size(); }
  std::size_t num_types() const { return p_.size(); }
  std::size_t K() const { return K_; }
  const std::vector<double>& p() const { return p_; }
  const Matrix& w() const { return w_; }
  const std::vector<double>& r() const { return r_; }

 private:
  std::vector<double> p_;
  Matrix w_;
  std::vector<double> r_;
  std::size_t K_ = 1;
};

struct ChoiceProbs {
  std::vector<double> item;  // aligned with the assortment
  double none = 0.0;
};

ChoiceProbs mnl_choice_probs(const Assortment& S, std::span<const double> w_col);

// Nonempty subsets of size <= K in lexicographic order of their sorted
// index tuples. Throws std::length_error naming the count above the cap.
std::vector<Assortment> enumerate_assortments(std::size_t n, std::size_t K);

// Sum over k = 1..min(K, N) of C(N, k), saturating.
std::uint64_t assortment_count(std::size_t n, std::size_t K);

struct AssortPolicy {
  std::vector<Assortment> sets;
  Matrix q;  // M x |sets|, each row a distribution
};

// Decision variable index j * |sets| + s; one simplex group per user type.
LinearOutcomes assort_item_outcomes(const AssortInstance& theta,
                                    const std::vector<Assortment>& sets,
                                    ItemOutcome kind);
// User j outcome coefficients log(1 + w_j(S)) over q_j, as an M x |sets|
// matrix.
Matrix assort_user_coef(const AssortInstance& theta,
                        const std::vector<Assortment>& sets);
// Per-type expected revenue of each assortment, M x |sets|.
Matrix assort_revenue_coef(const AssortInstance& theta,
                           const std::vector<Assortment>& sets);

double assort_revenue(const AssortInstance& theta, const AssortPolicy& q);
std::vector<double> assort_item_values(const LinearOutcomes& item,
                                       const Matrix& q);
std::vector<double> assort_user_values(const Matrix& user_coef,
                                       const Matrix& q);

// Per-type index into `sets` of the K largest weights, ties lexicographic.
std::vector<std::size_t> user_fair_assortments(
    const AssortInstance& theta, const std::vector<Assortment>& sets);

struct AssortTargets {
  LinearOutcomes item;
  Matrix user_coef;
  Matrix item_fair;  // M x |sets|
  Matrix user_fair;
  std::vector<double> item_rhs;
  std::vector<double> user_rhs;
};

AssortTargets assort_targets(const AssortInstance& theta,
                             const std::vector<Assortment>& sets,
                             const OutcomeSpec& spec,
                             const FairnessConfig& cfg);

struct AssortSolveResult {
  LpStatus status = LpStatus::kInfeasible;
  AssortPolicy policy;
  double revenue = 0.0;
};

AssortSolveResult solve_fair_assort(const AssortInstance& theta,
                                    const OutcomeSpec& spec,
                                    const FairnessConfig& cfg, double eta);
AssortSolveResult solve_fair_assort_targets(const AssortInstance& theta,
                                            const std::vector<Assortment>& sets,
                                            const AssortTargets& targets,
                                            double eta);

// Draws the MNL choice: an item index, or N for no purchase.
std::size_t sample_choice(const Assortment& S, std::span<const double> w_col,
                          std::size_t n_items, Rng& rng);

// Epoch-based weight estimates: within an epoch the offered assortment is
// fixed; a no-purchase closes it and every shown item's estimate becomes the
// mean per-epoch purchase count over the epochs it was shown in.
class EpochEstimator {
 public:
  EpochEstimator(std::size_t n, std::size_t m);

  // Records one round. Returns true when the round closed an epoch.
  bool Observe(std::size_t type, const Assortment& offered,
               std::size_t choice);

  std::size_t t() const { return t_; }
  const Matrix& w_hat() const { return w_hat_; }
  std::vector<double> p_hat() const;
  const std::vector<std::size_t>& epochs() const { return epochs_; }
  // Estimated instance with weights clamped to [kWeightFloor, kWeightCeil].
  AssortInstance Estimate(const std::vector<double>& r, std::size_t K) const;
  std::uint64_t Hash() const;

 private:
  std::size_t n_, m_;
  std::size_t t_ = 0;
  Matrix w_hat_;
  Matrix purchase_sum_;
  Matrix shown_epochs_;
  Matrix tally_;  // purchases within the current epoch
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> epochs_;
};

SimTrajectory run_form_assort(const AssortInstance& theta_true,
                              const OutcomeSpec& spec,
                              const FairnessConfig& cfg, std::size_t T,
                              std::uint64_t seed, const FormOptions& opts = {});

// Adds the true-instance metrics of the current assortment distribution to
// a record. Outcomes are cached by the caller per distribution change.
struct AssortMetricCache {
  std::vector<double> item;
  std::vector<double> user;
  double revenue = 0.0;
};
AssortMetricCache assort_metrics(const AssortInstance& theta,
                                 const std::vector<Assortment>& sets,
                                 const AssortTargets& targets, const Matrix& q);
void record_assort_metrics(SimTrajectory& traj, RoundRecord& rec,
                           const AssortMetricCache& cache);

}  // namespace fairrec

#endif  // FAIRREC_ASSORTMENT_H_

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

// Problem instance, recommendation policy, and the item/user outcome models
// every other module consumes.

#ifndef FAIRREC_INSTANCE_H_
#define FAIRREC_INSTANCE_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrec/matrix.h"

namespace fairrec {

inline constexpr double kEulerGamma = 0.57721566490153286;

// Tolerance on sum(p) == 1 for freshly constructed instances and for
// instances read back from a file.
inline constexpr double kArrivalSumTol = 1e-12;
inline constexpr double kArrivalSumFileTol = 1e-9;
inline constexpr double kPolicyColumnTol = 1e-9;

class InvalidInstance : public std::invalid_argument {
 public:
  InvalidInstance(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// theta = (p, y, r): arrival probabilities over M user types, N x M purchase
// probabilities, and N item revenues.
class Instance {
 public:
  Instance() = default;
  // Validates; throws InvalidInstance listing every violation.
  Instance(std::vector<double> p, Matrix y, std::vector<double> r,
           double sum_tol = kArrivalSumTol);

  // Estimated instances (IPW purchase estimates, empirical arrival rates) do
  // not satisfy the open-interval invariant; they skip validation.
  static Instance Estimated(std::vector<double> p, Matrix y,
                            std::vector<double> r);

  std::size_t num_items() const { return r_.size(); }
  std::size_t num_types() const { return p_.size(); }
  const std::vector<double>& p() const { return p_; }
  const Matrix& y() const { return y_; }
  const std::vector<double>& r() const { return r_; }

 private:
  std::vector<double> p_;
  Matrix y_;
  std::vector<double> r_;
};

// Returns every violated instance invariant; empty means valid.
std::vector<std::string> validate_instance(const std::vector<double>& p,
                                           const Matrix& y,
                                           const std::vector<double>& r,
                                           double sum_tol = kArrivalSumTol);
std::vector<std::string> validate_instance(const Instance& theta);

// Column-stochastic N x M recommendation matrix.
class Policy {
 public:
  Policy() = default;
  explicit Policy(Matrix x);
  static Policy Uniform(std::size_t n, std::size_t m);
  // One-hot column j on item choice[j].
  static Policy Deterministic(std::size_t n,
                              const std::vector<std::size_t>& choice);

  std::size_t num_items() const { return x_.rows(); }
  std::size_t num_types() const { return x_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return x_(i, j); }
  const Matrix& matrix() const { return x_; }

 private:
  Matrix x_;
};

enum class ItemOutcome { kVisibility, kMarketshare, kExpectedRevenue };
enum class UserModel { kMnl, kProbit, kValuationExp, kRawY };

struct OutcomeSpec {
  ItemOutcome item_kind = ItemOutcome::kVisibility;
  UserModel user_model = UserModel::kRawY;
  // sigma for probit, lambda for exponential valuations; ignored otherwise.
  double user_param = 1.0;

  void Validate() const;
};

enum class SwfKind { kMaxmin, kKalaiSmorodinsky, kHookerWilliams,
                     kDemographicParity };

struct FairnessConfig {
  double delta_item = 0.0;
  double delta_user = 0.0;
  SwfKind swf = SwfKind::kMaxmin;
  double hw_delta = 1.0;                 // Hooker-Williams threshold.
  std::vector<std::size_t> parity_group;  // 0-based item indices.

  // n_items is needed to check that the parity group is a proper subset.
  void Validate(std::size_t n_items) const;
};

std::string to_string(ItemOutcome k);
std::string to_string(UserModel k);
std::string to_string(SwfKind k);
ItemOutcome parse_item_outcome(const std::string& s);
UserModel parse_user_model(const std::string& s);
SwfKind parse_swf_kind(const std::string& s);

// rev(x) = sum_ij r_i p_j y_ij x_ij.
double expected_revenue(const Policy& x, const Instance& theta);

Matrix item_outcome_matrix(const Instance& theta, const OutcomeSpec& spec);
Matrix user_outcome_matrix(const Instance& theta, const OutcomeSpec& spec);

// Scalar expected utility for a single purchase probability. y <= 0 returns
// the y -> 0 limit (estimates can hit zero); y within 1e-15 of 1 throws for
// the models that diverge there.
double user_utility(double y, UserModel model, double param);

// O^I_i(x) = L_i . x_i and O^U_j(x) = U_:j . x_:j.
std::vector<double> item_outcomes(const Matrix& L, const Policy& x);
std::vector<double> user_outcomes(const Matrix& U, const Policy& x);

// Standard normal helpers used by the probit utility.
double normal_cdf(double z);
double normal_pdf(double z);
double normal_quantile(double q);

}  // namespace fairrec

#endif  // FAIRREC_INSTANCE_H_

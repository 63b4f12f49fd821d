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

// Revenue maximization under two-sided fairness constraints, its relaxed
// variant used online, and price-of-fairness analysis.

#ifndef FAIRREC_FAIR_OPT_H_
#define FAIRREC_FAIR_OPT_H_

#include <stdexcept>
#include <vector>

#include "fairrec/instance.h"
#include "fairrec/lp.h"
#include "fairrec/matrix.h"

namespace fairrec {

struct OptRev {
  double value = 0.0;
  Policy policy;
};

// Per-type argmax of r_i y_ij, ties to the lowest index.
OptRev opt_rev(const Instance& theta);

// Everything a fairness-constrained solve needs from an instance: outcome
// matrices, the single-sided fair policies, and the unrelaxed right-hand
// sides delta * O(f).
struct FairTargets {
  Matrix L;
  Matrix U;
  Policy item_fair;
  Policy user_fair;
  std::vector<double> item_rhs;
  std::vector<double> user_rhs;
};

FairTargets fair_targets(const Instance& theta, const OutcomeSpec& spec,
                         const FairnessConfig& cfg);

struct FairSolveResult {
  LpStatus status = LpStatus::kInfeasible;
  Policy policy;
  double fair_rev = 0.0;
  // Constraint slack O(x) - rhs: N item rows, then M user rows.
  std::vector<double> slack;
};

FairSolveResult solve_fair(const Instance& theta, const OutcomeSpec& spec,
                           const FairnessConfig& cfg);

// Same LP with every fairness right-hand side lowered by eta; everything is
// computed from the (possibly estimated) instance passed in.
FairSolveResult solve_fair_relax(const Instance& theta_hat,
                                 const OutcomeSpec& spec,
                                 const FairnessConfig& cfg, double eta);

// Core solve against precomputed targets.
FairSolveResult solve_fair_targets(const Instance& theta,
                                   const FairTargets& targets, double eta);

// Largest positive shortfall of x against the relaxed constraints.
double fairness_shortfall(const Policy& x, const FairTargets& targets,
                          double eta);

class InfeasibleFair : public std::runtime_error {
 public:
  InfeasibleFair() : std::runtime_error("fairness-constrained problem is infeasible") {}
  LpStatus status() const { return LpStatus::kInfeasible; }
};

// (OPT-REV - FAIR-REV) / OPT-REV; throws InfeasibleFair.
double price_of_fairness(const Instance& theta, const OutcomeSpec& spec,
                         const FairnessConfig& cfg);

// Constraint system of the fair problem in A x <= b form, rows ordered as
// N item rows, M user rows, then each simplex equality as a (<=, >=) pair.
struct ConstraintSystem {
  Matrix A;
  std::vector<double> b;
};
ConstraintSystem fair_constraint_system(const Instance& theta,
                                        const FairTargets& targets);

// H(A) times the worst fairness violation of the revenue-maximizing policy.
// Zero without computing H when that policy is already feasible.
double pof_upper_bound(const Instance& theta, const OutcomeSpec& spec,
                       const FairnessConfig& cfg);

}  // namespace fairrec

#endif  // FAIRREC_FAIR_OPT_H_

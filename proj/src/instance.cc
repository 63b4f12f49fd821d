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

#include "fairrec/instance.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fairrec {
namespace {

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

InvalidInstance::InvalidInstance(const std::vector<std::string>& violations)
    : std::invalid_argument("invalid instance: " + Join(violations)),
      violations_(violations) {}

std::vector<std::string> validate_instance(const std::vector<double>& p,
                                           const Matrix& y,
                                           const std::vector<double>& r,
                                           double sum_tol) {
  std::vector<std::string> out;
  const std::size_t n = r.size();
  const std::size_t m = p.size();
  if (n == 0) out.push_back("no items");
  if (m == 0) out.push_back("no user types");
  if (y.rows() != n || y.cols() != m) {
    std::ostringstream os;
    os << "y has shape " << y.rows() << "x" << y.cols() << ", expected " << n
       << "x" << m;
    out.push_back(os.str());
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(p[j]) || p[j] < 0.0) {
      std::ostringstream os;
      os << "p[" << j << "] = " << p[j] << " must be nonnegative";
      out.push_back(os.str());
    }
    sum += p[j];
  }
  if (m > 0 && !(std::abs(sum - 1.0) <= sum_tol)) {
    std::ostringstream os;
    os << "p sums to " << sum;
    out.push_back(os.str());
  }
  if (y.rows() == n && y.cols() == m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double v = y(i, j);
        if (!(v > 0.0 && v < 1.0)) {
          std::ostringstream os;
          os << "y[" << i << "][" << j << "] = " << v
             << ": y must be in open interval (0,1)";
          out.push_back(os.str());
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i])) {
      std::ostringstream os;
      os << "r[" << i << "] = " << r[i] << " must be positive";
      out.push_back(os.str());
    }
  }
  return out;
}

std::vector<std::string> validate_instance(const Instance& theta) {
  return validate_instance(theta.p(), theta.y(), theta.r());
}

Instance::Instance(std::vector<double> p, Matrix y, std::vector<double> r,
                   double sum_tol)
    : p_(std::move(p)), y_(std::move(y)), r_(std::move(r)) {
  auto violations = validate_instance(p_, y_, r_, sum_tol);
  if (!violations.empty()) throw InvalidInstance(violations);
}

Instance Instance::Estimated(std::vector<double> p, Matrix y,
                             std::vector<double> r) {
  if (y.rows() != r.size() || y.cols() != p.size()) {
    throw std::invalid_argument("estimated instance: dimension mismatch");
  }
  Instance out;
  out.p_ = std::move(p);
  out.y_ = std::move(y);
  out.r_ = std::move(r);
  return out;
}

Policy::Policy(Matrix x) : x_(std::move(x)) {
  for (std::size_t j = 0; j < x_.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      if (!(x_(i, j) >= 0.0)) {
        throw std::invalid_argument("policy entry is negative or NaN");
      }
      s += x_(i, j);
    }
    if (std::abs(s - 1.0) > kPolicyColumnTol) {
      std::ostringstream os;
      os << "policy column " << j << " sums to " << s;
      throw std::invalid_argument(os.str());
    }
  }
}

Policy Policy::Uniform(std::size_t n, std::size_t m) {
  return Policy(Matrix(n, m, 1.0 / static_cast<double>(n)));
}

Policy Policy::Deterministic(std::size_t n,
                             const std::vector<std::size_t>& choice) {
  Matrix x(n, choice.size(), 0.0);
  for (std::size_t j = 0; j < choice.size(); ++j) x(choice[j], j) = 1.0;
  return Policy(std::move(x));
}

void OutcomeSpec::Validate() const {
  if ((user_model == UserModel::kProbit ||
       user_model == UserModel::kValuationExp) &&
      !(user_param > 0.0)) {
    throw std::invalid_argument("user model parameter must be positive");
  }
}

void FairnessConfig::Validate(std::size_t n_items) const {
  auto in_unit = [](double d) { return d >= 0.0 && d <= 1.0; };
  if (!in_unit(delta_item) || !in_unit(delta_user)) {
    throw std::invalid_argument("fairness deltas must lie in [0,1]");
  }
  if (swf == SwfKind::kHookerWilliams && !(hw_delta > 0.0)) {
    throw std::invalid_argument("Hooker-Williams delta must be positive");
  }
  if (swf == SwfKind::kDemographicParity) {
    std::vector<bool> seen(n_items, false);
    for (std::size_t i : parity_group) {
      if (i >= n_items || seen[i]) {
        throw std::invalid_argument("parity group has invalid item index");
      }
      seen[i] = true;
    }
    if (parity_group.empty() || parity_group.size() >= n_items) {
      throw std::invalid_argument(
          "parity group must be a nonempty proper subset of items");
    }
  }
}

std::string to_string(ItemOutcome k) {
  switch (k) {
    case ItemOutcome::kVisibility: return "visibility";
    case ItemOutcome::kMarketshare: return "marketshare";
    case ItemOutcome::kExpectedRevenue: return "expected_revenue";
  }
  return "?";
}

std::string to_string(UserModel k) {
  switch (k) {
    case UserModel::kMnl: return "mnl";
    case UserModel::kProbit: return "probit";
    case UserModel::kValuationExp: return "valuation_exp";
    case UserModel::kRawY: return "raw_y";
  }
  return "?";
}

std::string to_string(SwfKind k) {
  switch (k) {
    case SwfKind::kMaxmin: return "maxmin";
    case SwfKind::kKalaiSmorodinsky: return "ks";
    case SwfKind::kHookerWilliams: return "hooker_williams";
    case SwfKind::kDemographicParity: return "demographic_parity";
  }
  return "?";
}

ItemOutcome parse_item_outcome(const std::string& s) {
  if (s == "visibility") return ItemOutcome::kVisibility;
  if (s == "marketshare") return ItemOutcome::kMarketshare;
  if (s == "expected_revenue" || s == "revenue") {
    return ItemOutcome::kExpectedRevenue;
  }
  throw std::invalid_argument("unknown item outcome: " + s);
}

UserModel parse_user_model(const std::string& s) {
  if (s == "mnl") return UserModel::kMnl;
  if (s == "probit") return UserModel::kProbit;
  if (s == "valuation_exp") return UserModel::kValuationExp;
  if (s == "raw_y") return UserModel::kRawY;
  throw std::invalid_argument("unknown user model: " + s);
}

SwfKind parse_swf_kind(const std::string& s) {
  if (s == "maxmin") return SwfKind::kMaxmin;
  if (s == "ks") return SwfKind::kKalaiSmorodinsky;
  if (s == "hooker_williams" || s == "hw") return SwfKind::kHookerWilliams;
  if (s == "demographic_parity" || s == "parity") {
    return SwfKind::kDemographicParity;
  }
  throw std::invalid_argument("unknown social welfare function: " + s);
}

double expected_revenue(const Policy& x, const Instance& theta) {
  const std::size_t n = theta.num_items(), m = theta.num_types();
  if (x.num_items() != n || x.num_types() != m) {
    throw std::invalid_argument("policy/instance dimension mismatch");
  }
  double rev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      rev += theta.r()[i] * theta.p()[j] * theta.y()(i, j) * x(i, j);
    }
  }
  return rev;
}

Matrix item_outcome_matrix(const Instance& theta, const OutcomeSpec& spec) {
  const std::size_t n = theta.num_items(), m = theta.num_types();
  Matrix L(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double pj = theta.p()[j];
      switch (spec.item_kind) {
        case ItemOutcome::kVisibility:
          L(i, j) = pj;
          break;
        case ItemOutcome::kMarketshare:
          L(i, j) = pj * theta.y()(i, j);
          break;
        case ItemOutcome::kExpectedRevenue:
          L(i, j) = theta.r()[i] * pj * theta.y()(i, j);
          break;
      }
    }
  }
  return L;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation followed by one Halley step against erfc.
double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("normal quantile needs q in (0,1)");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (q < kLow) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (q <= 1.0 - kLow) {
    const double s = q - 0.5, t = s * s;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) *
        s /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t +
          c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  const double e = normal_cdf(x) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double user_utility(double y, UserModel model, double param) {
  constexpr double kNearOne = 1e-15;
  switch (model) {
    case UserModel::kRawY:
      return y;
    case UserModel::kValuationExp:
      return y / param;
    case UserModel::kMnl:
      if (1.0 - y < kNearOne) {
        throw std::domain_error("MNL utility overflows for y near 1");
      }
      if (y <= 0.0) return kEulerGamma;
      return -std::log1p(-y) + kEulerGamma;
    case UserModel::kProbit: {
      if (1.0 - y < kNearOne) {
        throw std::domain_error("probit utility overflows for y near 1");
      }
      if (y <= 0.0) return 0.0;
      const double s = std::numbers::sqrt2 * param;
      const double v = s * normal_quantile(y);
      return v * normal_cdf(v / s) + s * normal_pdf(v / s);
    }
  }
  return 0.0;
}

Matrix user_outcome_matrix(const Instance& theta, const OutcomeSpec& spec) {
  spec.Validate();
  const std::size_t n = theta.num_items(), m = theta.num_types();
  Matrix U(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      U(i, j) = user_utility(theta.y()(i, j), spec.user_model, spec.user_param);
    }
  }
  return U;
}

std::vector<double> item_outcomes(const Matrix& L, const Policy& x) {
  std::vector<double> out(L.rows(), 0.0);
  for (std::size_t i = 0; i < L.rows(); ++i) {
    for (std::size_t j = 0; j < L.cols(); ++j) out[i] += L(i, j) * x(i, j);
  }
  return out;
}

std::vector<double> user_outcomes(const Matrix& U, const Policy& x) {
  std::vector<double> out(U.cols(), 0.0);
  for (std::size_t j = 0; j < U.cols(); ++j) {
    for (std::size_t i = 0; i < U.rows(); ++i) out[j] += U(i, j) * x(i, j);
  }
  return out;
}

}  // namespace fairrec

#pragma once
// Closed-form Bayes bounds for a binary certification rule.
//
// A rule accepts ("certifies") an instrument. With base rate pi of genuine
// successes, sensitivity S and false positive rate F, the precision of the
// certificate is PPV = pi*S / (pi*S + (1-pi)*F). Everything in this header
// follows from that identity; all values are full double precision and no
// rounding for display happens here.

#include <optional>

namespace certfeas {

// Probability in the closed interval [0, 1].
class Probability {
 public:
  explicit Probability(double value, const char* field = "probability");
  double value() const noexcept { return value_; }
  friend bool operator==(Probability, Probability) = default;

 private:
  double value_;
};

// Base rate of success within the reference class, restricted to (0, 1).
class BaseRate {
 public:
  explicit BaseRate(double pi);
  double value() const noexcept { return pi_; }

 private:
  double pi_;
};

// Precision target tau in (0, 1).
class ReliabilityTarget {
 public:
  explicit ReliabilityTarget(double tau);
  double value() const noexcept { return tau_; }

 private:
  double tau_;
};

// Discrimination ratio Lambda = S/F in (0, inf]. The infinite value stands for
// a signal that can separate the classes perfectly.
class Discrimination {
 public:
  static Discrimination finite(double lambda);
  static Discrimination infinite() noexcept { return Discrimination(); }

  bool is_finite() const noexcept { return finite_; }
  // +inf when not finite.
  double value() const noexcept;

 private:
  Discrimination() = default;
  double lambda_ = 0.0;
  bool finite_ = false;
};

struct RuleMetrics {
  Probability sensitivity;
  Probability false_positive_rate;

  // S/F, absent when F = 0.
  std::optional<double> lambda() const;
  // Bayes form pi*S / (pi*S + (1-pi)*F); absent when the rule accepts nothing.
  std::optional<double> ppv(BaseRate pi) const;
};

struct FeasibilityInputs {
  ReliabilityTarget tau;
  BaseRate pi;
  Discrimination lambda_avail;
  // Minimum issuance rate, when lambda_avail is a coverage-constrained ceiling.
  std::optional<double> coverage_q;
};

struct FeasibilityVerdict {
  double lambda_req;
  Probability max_ppv;
  double tension_psi;
  bool feasible;
};

// pi*L / (pi*L + (1 - pi)); exactly 1 for infinite L.
Probability ppv_from_lambda(BaseRate pi, Discrimination lambda);

// Smallest Lambda for which PPV >= tau at base rate pi:
// (tau / (1 - tau)) * ((1 - pi) / pi).
double lambda_required(ReliabilityTarget tau, BaseRate pi);

// Supremum of PPV over admissible rules when no rule can exceed lambda_avail.
Probability max_ppv(BaseRate pi, Discrimination lambda_avail);

// lambda_required / lambda_avail, or 0 when lambda_avail is infinite.
double tension_ratio(ReliabilityTarget tau, BaseRate pi, Discrimination lambda_avail);

// Minimum base rate at which lambda_avail suffices for tau:
// tau / (tau + (1 - tau) * lambda_avail). Requires a finite positive ceiling.
Probability rescue_min_base_rate(ReliabilityTarget tau, double lambda_avail);

// Discrimination implied retrospectively by failure rate f among certified
// instruments: ((1 - f) / f) * ((1 - pi) / pi). f must lie in (0, 1).
double achieved_discrimination(double failure_rate, BaseRate pi);

// lambda_required / achieved_discrimination with PPV_obs = 1 - f. The base
// rate cancels: tau * (1 - PPV_obs) / ((1 - tau) * PPV_obs).
double prior_free_deficit(double ppv_obs, ReliabilityTarget tau);

// Since S <= 1, every rule with false positive rate F has Lambda <= 1/F.
double model_free_lambda_cap(double fpr);

// Feasibility is decided by comparing max_ppv against tau rather than by the
// tension ratio, so the Psi = 0 convention for infinite ceilings never leaks
// into the verdict.
FeasibilityVerdict assess(const FeasibilityInputs& in);

}  // namespace certfeas

#include "certfeas/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "certfeas/error.hpp"

namespace certfeas {

namespace {

void require_open_unit(double v, const char* field) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(field, "must lie in the open interval (0, 1), got " + std::to_string(v));
  }
}

}  // namespace

Probability::Probability(double value, const char* field) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError(field, "must lie in [0, 1], got " + std::to_string(value));
  }
}

BaseRate::BaseRate(double pi) : pi_(pi) { require_open_unit(pi, "pi"); }

ReliabilityTarget::ReliabilityTarget(double tau) : tau_(tau) { require_open_unit(tau, "tau"); }

Discrimination Discrimination::finite(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda", "finite discrimination must be positive, got " + std::to_string(lambda));
  }
  Discrimination d;
  d.lambda_ = lambda;
  d.finite_ = true;
  return d;
}

double Discrimination::value() const noexcept {
  return finite_ ? lambda_ : std::numeric_limits<double>::infinity();
}

std::optional<double> RuleMetrics::lambda() const {
  if (false_positive_rate.value() <= 0.0) return std::nullopt;
  return sensitivity.value() / false_positive_rate.value();
}

std::optional<double> RuleMetrics::ppv(BaseRate pi) const {
  const double tp = pi.value() * sensitivity.value();
  const double fp = (1.0 - pi.value()) * false_positive_rate.value();
  if (tp + fp <= 0.0) return std::nullopt;
  return tp / (tp + fp);
}

Probability ppv_from_lambda(BaseRate pi, Discrimination lambda) {
  if (!lambda.is_finite()) return Probability(1.0);
  const double num = pi.value() * lambda.value();
  return Probability(num / (num + (1.0 - pi.value())));
}

double lambda_required(ReliabilityTarget tau, BaseRate pi) {
  const double t = tau.value();
  const double p = pi.value();
  return (t / (1.0 - t)) * ((1.0 - p) / p);
}

Probability max_ppv(BaseRate pi, Discrimination lambda_avail) {
  return ppv_from_lambda(pi, lambda_avail);
}

double tension_ratio(ReliabilityTarget tau, BaseRate pi, Discrimination lambda_avail) {
  if (!lambda_avail.is_finite()) return 0.0;
  return lambda_required(tau, pi) / lambda_avail.value();
}

Probability rescue_min_base_rate(ReliabilityTarget tau, double lambda_avail) {
  if (!(lambda_avail > 0.0) || !std::isfinite(lambda_avail)) {
    throw DomainError("lambda_avail", "must be finite and positive, got " + std::to_string(lambda_avail));
  }
  const double t = tau.value();
  return Probability(t / (t + (1.0 - t) * lambda_avail));
}

double achieved_discrimination(double failure_rate, BaseRate pi) {
  require_open_unit(failure_rate, "failure_rate");
  const double f = failure_rate;
  const double p = pi.value();
  return ((1.0 - f) / f) * ((1.0 - p) / p);
}

double prior_free_deficit(double ppv_obs, ReliabilityTarget tau) {
  require_open_unit(ppv_obs, "ppv_obs");
  const double t = tau.value();
  return t * (1.0 - ppv_obs) / ((1.0 - t) * ppv_obs);
}

double model_free_lambda_cap(double fpr) {
  if (!(fpr > 0.0 && fpr <= 1.0)) {
    throw DomainError("fpr", "must lie in (0, 1], got " + std::to_string(fpr));
  }
  return 1.0 / fpr;
}

FeasibilityVerdict assess(const FeasibilityInputs& in) {
  if (in.coverage_q && !(*in.coverage_q > 0.0 && *in.coverage_q <= 1.0)) {
    throw DomainError("coverage", "must lie in (0, 1], got " + std::to_string(*in.coverage_q));
  }
  const Probability best = max_ppv(in.pi, in.lambda_avail);
  return FeasibilityVerdict{
      .lambda_req = lambda_required(in.tau, in.pi),
      .max_ppv = best,
      .tension_psi = tension_ratio(in.tau, in.pi, in.lambda_avail),
      .feasible = best.value() >= in.tau.value(),
  };
}

}  // namespace certfeas

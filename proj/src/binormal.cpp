#include "certfeas/binormal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "certfeas/error.hpp"
#include "certfeas/normal.hpp"

namespace certfeas {

BinormalModel::BinormalModel(double dprime) : dprime_(dprime) {
  if (!(dprime >= 0.0) || !std::isfinite(dprime)) {
    throw DomainError("dprime", "must be finite and non-negative, got " + std::to_string(dprime));
  }
}

BinormalModel BinormalModel::from_auc(double auc) { return BinormalModel(dprime_from_auc(auc)); }

double BinormalModel::auc() const { return auc_from_dprime(dprime_); }

double dprime_from_auc(double auc) {
  if (!(auc >= 0.5 && auc < 1.0)) {
    throw DomainError("auc", "must lie in [0.5, 1), got " + std::to_string(auc));
  }
  return std::numbers::sqrt2 * normal::quantile(auc);
}

double auc_from_dprime(double dprime) {
  if (!(dprime >= 0.0) || !std::isfinite(dprime)) {
    throw DomainError("dprime", "must be finite and non-negative, got " + std::to_string(dprime));
  }
  return normal::cdf(dprime / std::numbers::sqrt2);
}

double lambda_at_threshold(const BinormalModel& model, double t) {
  if (!std::isfinite(t)) throw DomainError("threshold", "must be finite");
  const double d = model.dprime();
  if (d == 0.0) return 1.0;
  // Both tails are upper tails of N(0,1): ccdf(t - d) / ccdf(t). Once both
  // arguments are positive, write ccdf(u) = exp(-u^2/2) erfcx(u/sqrt2) / 2.
  const double u = t - d;
  if (u > 1.0) {
    const double log_gauss = 0.5 * (t * t - u * u);  // = d*t - d^2/2
    return std::exp(log_gauss) * normal::erfcx(u / std::numbers::sqrt2) /
           normal::erfcx(t / std::numbers::sqrt2);
  }
  return normal::ccdf(u) / normal::ccdf(t);
}

ThresholdPoint lambda_at_fpr(const BinormalModel& model, double fpr) {
  if (!(fpr > 0.0 && fpr < 1.0)) {
    throw DomainError("fpr", "must lie in (0, 1), got " + std::to_string(fpr));
  }
  const double t = -normal::quantile(fpr);
  const double s = normal::ccdf(t - model.dprime());
  const double f = normal::ccdf(t);
  return ThresholdPoint{.threshold = t, .sensitivity = s, .fpr = f, .lambda = s / f};
}

}  // namespace certfeas

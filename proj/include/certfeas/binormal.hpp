#pragma once
// Equal-variance binormal score model: X | E=0 ~ N(0, 1), X | E=1 ~ N(d', 1).

namespace certfeas {

class BinormalModel {
 public:
  explicit BinormalModel(double dprime);
  static BinormalModel from_auc(double auc);

  double dprime() const noexcept { return dprime_; }
  double auc() const;

 private:
  double dprime_;
};

// Threshold rule "accept iff x >= threshold" evaluated under a BinormalModel.
struct ThresholdPoint {
  double threshold;
  double sensitivity;  // Phi(d' - t)
  double fpr;          // Phi(-t)
  double lambda;       // sensitivity / fpr
};

// sqrt(2) * Phi^{-1}(auc), auc in [0.5, 1).
double dprime_from_auc(double auc);
// Phi(d' / sqrt(2)), d' >= 0.
double auc_from_dprime(double dprime);

// Threshold placed so that the false positive rate equals fpr.
ThresholdPoint lambda_at_fpr(const BinormalModel& model, double fpr);

// Phi(d' - t) / Phi(-t). Evaluated through erfcx in the far tail, so the
// ratio stays finite long after both probabilities underflow.
double lambda_at_threshold(const BinormalModel& model, double t);

}  // namespace certfeas

#pragma once
// Seeded Monte Carlo of a correlated loan pool under a one-factor Gaussian
// copula, with a single tranche and a noisy rating-time signal.
//
// Loan j defaults iff sqrt(rho) Z + sqrt(1 - rho) e_j <= Phi^{-1}(pd) with Z and
// e_j independent N(0, 1). Conditional on Z the defaults are independent with
// probability p(Z) = Phi((Phi^{-1}(pd) - sqrt(rho) Z) / sqrt(1 - rho)); that is
// how they are drawn, one uniform per loan.
//
// Every replication owns a Philox stream keyed by (seed, replication index),
// so outputs are identical for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "certfeas/discrete_lab.hpp"

namespace certfeas {

struct PoolSpec {
  int n_loans = 100;
  double pd = 0.02;
  double rho = 0.0;
  double lgd = 1.0;

  void validate() const;
};

struct Regime {
  PoolSpec pool;
  double weight = 1.0;
};

struct RegimeMixture {
  std::vector<Regime> regimes;

  static RegimeMixture single(PoolSpec pool) { return RegimeMixture{{Regime{pool, 1.0}}}; }
  void validate() const;
};

struct TrancheSpec {
  double attachment = 0.0;
  double detachment = 1.0;

  void validate() const;
  // clamp((pool_loss - attachment) / (detachment - attachment), 0, 1)
  double loss(double pool_loss) const noexcept;
};

enum class SignalModel {
  // Phi^{-1} of the model-implied tranche survival probability given the
  // systematic factor and regime, plus N(0, sd^2) noise.
  survival_score,
  // The realized event E itself plus N(0, sd^2) noise: X | E is binormal with
  // separation d' = 1/sd.
  event_indicator,
};

struct SimConfig {
  RegimeMixture regimes;
  TrancheSpec tranche;
  double signal_noise_sd = 0.0;
  SignalModel signal_model = SignalModel::survival_score;

  void validate() const;
};

struct SimOutcome {
  std::uint64_t rep;
  int regime;
  int n_defaults;
  double pool_loss_fraction;
  double tranche_loss;
  bool event;  // true iff the tranche loses nothing
  double signal;
};

// Pure function of (config, seed, rep).
SimOutcome simulate_one(const SimConfig& config, std::uint64_t seed, std::uint64_t rep);

// Replications 0..n_reps-1 in index order. workers = 0 picks the hardware
// concurrency.
std::vector<SimOutcome> simulate(const SimConfig& config, std::uint64_t n_reps, std::uint64_t seed,
                                 unsigned workers = 0);

struct Interval {
  double estimate;
  double low;
  double high;
};

// Wilson score interval at 95% for k successes in n trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct EmpiricalMetrics {
  std::uint64_t n = 0;
  std::uint64_t n_success = 0;  // E = 1
  std::uint64_t n_failure = 0;  // E = 0
  std::uint64_t true_pos = 0;   // accepted and E = 1
  std::uint64_t false_pos = 0;  // accepted and E = 0
  Interval base_rate;
  Interval sensitivity;
  Interval fpr;
  std::optional<Interval> ppv;     // absent when nothing is accepted
  std::optional<Interval> lambda;  // absent when fpr = 0; bounds from Wilson S and F
};

// Rule "accept iff signal >= threshold". Throws DegenerateSample unless the
// sample holds both outcomes.
EmpiricalMetrics estimate_metrics(const std::vector<SimOutcome>& outcomes, double threshold);

// Threshold whose empirical false positive rate is round(target * n_failure) /
// n_failure (ties aside).
double threshold_for_fpr(const std::vector<SimOutcome>& outcomes, double target_fpr);

struct PoolSummary {
  std::uint64_t n_reps;
  Interval default_frequency;  // mean per-replication default fraction, normal CI
  Interval mean_pool_loss;
  Interval mean_tranche_loss;
  Interval tranche_loss_prob;  // P(E = 0), Wilson
};

// Means use compensated summation over the replication-ordered stream.
PoolSummary summarize(const std::vector<SimOutcome>& outcomes, const RegimeMixture& regimes);

struct CorrelationSensitivity {
  Interval loss_prob_low;   // P(tranche loss > 0) at the lower correlation
  Interval loss_prob_high;
  std::uint64_t events_low;
  std::uint64_t events_high;
  double ratio;     // high / low; +inf when the low count is zero
  double ci_low;    // 95%
  double ci_high;
  bool censored;    // a zero count; bounds come from Wilson limits
};

// Both pools must agree in everything but rho. Runs with common random numbers.
CorrelationSensitivity correlation_sensitivity(const PoolSpec& low_rho, const PoolSpec& high_rho,
                                               const TrancheSpec& tranche, std::uint64_t n_reps,
                                               std::uint64_t seed, unsigned workers = 0);

struct TrancheCeilingExperiment {
  DiscreteSignalSpace shallow_space;
  DiscreteSignalSpace deep_space;
  double shallow_ceiling;
  double deep_ceiling;
  double shallow_base_rate;
  double deep_base_rate;
};

// Bins the signal into n_bins equal-count bins by rank and builds one
// DiscreteSignalSpace per event definition (shallow or deep tranche survival)
// from the same simulated sample. The signal is the one produced for the
// shallow tranche, so both spaces carry identical information.
TrancheCeilingExperiment tranche_event_ceiling_experiment(const RegimeMixture& regimes,
                                                          const TrancheSpec& shallow,
                                                          const TrancheSpec& deep,
                                                          double signal_noise_sd,
                                                          std::uint64_t n_reps, std::uint64_t seed,
                                                          int n_bins, unsigned workers = 0);

// Equal-count binning of the signal by rank (ties broken by replication
// index): bin(rank) = floor(rank * n_bins / N). Partitions with n_bins
// dividing a finer count nest exactly.
std::vector<int> rank_bins(const std::vector<SimOutcome>& outcomes, int n_bins);

// Space over bins from class-conditional bin frequencies of `events`.
DiscreteSignalSpace binned_space(const std::vector<int>& bins, const std::vector<bool>& events,
                                 int n_bins);

}  // namespace certfeas

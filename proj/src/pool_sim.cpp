#include "certfeas/pool_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "certfeas/error.hpp"
#include "certfeas/normal.hpp"
#include "certfeas/philox.hpp"

namespace certfeas {

namespace {

constexpr double kZ95 = 1.959963984540054;

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw DomainError(field, msg);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Probit of a probability supplied as its logarithm. Below the double range
// of the quantile routine the Mills-ratio asymptote is used.
double probit_from_log(double log_p) {
  if (log_p > -690.0) return normal::quantile(std::exp(log_p));
  const double t = -2.0 * log_p;
  return -std::sqrt(t - std::log(2.0 * std::numbers::pi * t));
}

struct BinomialSplit {
  double log_lower;  // log P(D <= k)
  double log_upper;  // log P(D > k)
};

// log of 0..n (index i holds log(i); log(0) unused).
std::vector<double> log_integers(int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 1; i <= n; ++i) t[static_cast<std::size_t>(i)] = std::log(static_cast<double>(i));
  return t;
}

BinomialSplit binomial_split(int n, double p, int k, const std::vector<double>& log_int) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (k >= n) return {0.0, kNegInf};
  if (p <= 0.0) return {0.0, kNegInf};
  if (p >= 1.0) return {kNegInf, 0.0};

  const double log_odds = std::log(p) - std::log1p(-p);
  const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * p)), 0, n);
  const double log_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) +
                          mode * std::log(p) + (n - mode) * std::log1p(-p);

  BinomialSplit out{kNegInf, kNegInf};
  auto add = [&](int j, double lp) {
    if (j <= k) {
      out.log_lower = log_add(out.log_lower, lp);
    } else {
      out.log_upper = log_add(out.log_upper, lp);
    }
  };
  add(mode, log_mode);
  double lp = log_mode;
  for (int j = mode + 1; j <= n; ++j) {
    lp += log_int[static_cast<std::size_t>(n - j + 1)] - log_int[static_cast<std::size_t>(j)] + log_odds;
    add(j, lp);
  }
  lp = log_mode;
  for (int j = mode - 1; j >= 0; --j) {
    lp += log_int[static_cast<std::size_t>(j + 1)] - log_int[static_cast<std::size_t>(n - j)] - log_odds;
    add(j, lp);
  }
  return out;
}

// Largest default count whose pool loss stays at or below the attachment,
// computed with the same expression used for the realized loss.
int max_surviving_defaults(const PoolSpec& pool, const TrancheSpec& tranche) {
  int k = 0;
  while (k < pool.n_loans && pool.lgd * (k + 1) / pool.n_loans <= tranche.attachment) ++k;
  return k;
}

struct SimContext {
  const SimConfig& config;
  std::vector<double> quantile_pd;
  std::vector<int> surviving_defaults;
  std::vector<double> log_int;
  bool with_signal;

  SimContext(const SimConfig& c, bool signal) : config(c), with_signal(signal) {
    int max_n = 1;
    for (const auto& r : c.regimes.regimes) {
      quantile_pd.push_back(normal::quantile(r.pool.pd));
      surviving_defaults.push_back(max_surviving_defaults(r.pool, c.tranche));
      max_n = std::max(max_n, r.pool.n_loans);
    }
    log_int = log_integers(max_n);
  }
};

SimOutcome run_replication(const SimContext& ctx, std::uint64_t seed, std::uint64_t rep) {
  const SimConfig& cfg = ctx.config;
  PhiloxStream rng(seed, rep);

  std::size_t regime = 0;
  const auto& regimes = cfg.regimes.regimes;
  if (regimes.size() > 1) {
    const double u = rng.next_open01();
    double cum = 0.0;
    regime = regimes.size() - 1;
    for (std::size_t i = 0; i < regimes.size(); ++i) {
      cum += regimes[i].weight;
      if (u < cum) {
        regime = i;
        break;
      }
    }
  }
  const PoolSpec& pool = regimes[regime].pool;

  const double z = normal::quantile(rng.next_open01());
  const double p_cond =
      pool.rho == 0.0
          ? pool.pd
          : normal::cdf((ctx.quantile_pd[regime] - std::sqrt(pool.rho) * z) / std::sqrt(1.0 - pool.rho));

  int defaults = 0;
  for (int j = 0; j < pool.n_loans; ++j) {
    if (rng.next_open01() < p_cond) ++defaults;
  }

  SimOutcome out{};
  out.rep = rep;
  out.regime = static_cast<int>(regime);
  out.n_defaults = defaults;
  out.pool_loss_fraction = pool.lgd * defaults / pool.n_loans;
  out.tranche_loss = cfg.tranche.loss(out.pool_loss_fraction);
  out.event = out.tranche_loss == 0.0;

  if (ctx.with_signal) {
    double score = 0.0;
    if (cfg.signal_model == SignalModel::event_indicator) {
      score = out.event ? 1.0 : 0.0;
    } else {
      const BinomialSplit split =
          binomial_split(pool.n_loans, p_cond, ctx.surviving_defaults[regime], ctx.log_int);
      // Survival probability = P(D <= k); use whichever tail is smaller.
      score = split.log_upper < split.log_lower ? -probit_from_log(split.log_upper)
                                                : probit_from_log(split.log_lower);
    }
    const double noise_u = rng.next_open01();
    out.signal = cfg.signal_noise_sd > 0.0 ? score + cfg.signal_noise_sd * normal::quantile(noise_u) : score;
  }
  return out;
}

std::vector<SimOutcome> run_all(const SimConfig& config, std::uint64_t n_reps, std::uint64_t seed,
                                unsigned workers, bool with_signal) {
  config.validate();
  require(n_reps >= 1, "reps", "need at least one replication");
  const SimContext ctx(config, with_signal);
  std::vector<SimOutcome> out(n_reps);

  unsigned n_workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  n_workers = static_cast<unsigned>(std::min<std::uint64_t>(n_workers, n_reps));
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) out[r] = run_replication(ctx, seed, r);
  };
  if (n_workers == 1) {
    work(0, n_reps);
    return out;
  }
  {
    std::vector<std::jthread> threads;
    const std::uint64_t chunk = (n_reps + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(n_reps, begin + chunk);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
  }
  return out;
}

}  // namespace

void PoolSpec::validate() const {
  require(n_loans >= 1, "n_loans", "must be a positive integer");
  require(pd > 0.0 && pd < 1.0, "pd", "must lie in (0, 1)");
  require(rho >= 0.0 && rho < 1.0, "rho", "must lie in [0, 1)");
  require(lgd >= 0.0 && lgd <= 1.0, "lgd", "must lie in [0, 1]");
}

void RegimeMixture::validate() const {
  require(!regimes.empty(), "regimes", "need at least one regime");
  double total = 0.0;
  for (const auto& r : regimes) {
    r.pool.validate();
    require(r.weight >= 0.0 && r.weight <= 1.0, "weight", "must lie in [0, 1]");
    total += r.weight;
  }
  require(std::fabs(total - 1.0) <= 1e-12, "weight", "regime weights must sum to 1");
}

void TrancheSpec::validate() const {
  require(attachment >= 0.0 && attachment < detachment && detachment <= 1.0, "tranche",
          "need 0 <= attachment < detachment <= 1");
}

double TrancheSpec::loss(double pool_loss) const noexcept {
  return std::clamp((pool_loss - attachment) / (detachment - attachment), 0.0, 1.0);
}

void SimConfig::validate() const {
  regimes.validate();
  tranche.validate();
  require(signal_noise_sd >= 0.0 && std::isfinite(signal_noise_sd), "signal_noise_sd",
          "must be finite and non-negative");
}

SimOutcome simulate_one(const SimConfig& config, std::uint64_t seed, std::uint64_t rep) {
  config.validate();
  return run_replication(SimContext(config, true), seed, rep);
}

std::vector<SimOutcome> simulate(const SimConfig& config, std::uint64_t n_reps, std::uint64_t seed,
                                 unsigned workers) {
  return run_all(config, n_reps, seed, workers, true);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw DegenerateSample("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return Interval{p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EmpiricalMetrics estimate_metrics(const std::vector<SimOutcome>& outcomes, double threshold) {
  EmpiricalMetrics m;
  m.n = outcomes.size();
  for (const auto& o : outcomes) {
    const bool accept = o.signal >= threshold;
    if (o.event) {
      ++m.n_success;
      if (accept) ++m.true_pos;
    } else {
      ++m.n_failure;
      if (accept) ++m.false_pos;
    }
  }
  if (m.n_success == 0 || m.n_failure == 0) {
    throw DegenerateSample("sample needs at least one E=1 and one E=0 outcome");
  }
  m.base_rate = wilson_interval(m.n_success, m.n);
  m.sensitivity = wilson_interval(m.true_pos, m.n_success);
  m.fpr = wilson_interval(m.false_pos, m.n_failure);
  if (m.true_pos + m.false_pos > 0) m.ppv = wilson_interval(m.true_pos, m.true_pos + m.false_pos);
  if (m.false_pos > 0) {
    const double hi = m.fpr.low > 0.0 ? m.sensitivity.high / m.fpr.low : std::numeric_limits<double>::infinity();
    m.lambda = Interval{m.sensitivity.estimate / m.fpr.estimate, m.sensitivity.low / m.fpr.high, hi};
  }
  return m;
}

double threshold_for_fpr(const std::vector<SimOutcome>& outcomes, double target_fpr) {
  require(target_fpr >= 0.0 && target_fpr <= 1.0, "fpr", "target must lie in [0, 1]");
  std::vector<double> neg;
  for (const auto& o : outcomes) {
    if (!o.event) neg.push_back(o.signal);
  }
  if (neg.empty()) throw DegenerateSample("no E=0 outcomes to place a threshold");
  std::sort(neg.begin(), neg.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(std::llround(target_fpr * static_cast<double>(neg.size())));
  if (k == 0) return std::nextafter(neg.front(), std::numeric_limits<double>::infinity());
  return neg[std::min(k, neg.size()) - 1];
}

namespace {

// Neumaier-compensated running sums of x and x^2.
class MeanAccumulator {
 public:
  void add(double x) {
    add_to(sum_, comp_, x);
    add_to(sum_sq_, comp_sq_, x * x);
    ++n_;
  }

  Interval interval() const {
    const double n = static_cast<double>(n_);
    const double mean = (sum_ + comp_) / n;
    const double var = n > 1 ? std::max(0.0, ((sum_sq_ + comp_sq_) - n * mean * mean) / (n - 1.0)) : 0.0;
    const double half = kZ95 * std::sqrt(var / n);
    return Interval{mean, mean - half, mean + half};
  }

 private:
  static void add_to(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double sum_ = 0.0;
  double comp_ = 0.0;
  double sum_sq_ = 0.0;
  double comp_sq_ = 0.0;
  std::uint64_t n_ = 0;
};

}  // namespace

PoolSummary summarize(const std::vector<SimOutcome>& outcomes, const RegimeMixture& regimes) {
  if (outcomes.empty()) throw DegenerateSample("no replications to summarize");
  MeanAccumulator defaults;
  MeanAccumulator pool_loss;
  MeanAccumulator tranche_loss;
  std::uint64_t losses = 0;
  for (const auto& o : outcomes) {
    const int n_loans = regimes.regimes.at(static_cast<std::size_t>(o.regime)).pool.n_loans;
    defaults.add(static_cast<double>(o.n_defaults) / n_loans);
    pool_loss.add(o.pool_loss_fraction);
    tranche_loss.add(o.tranche_loss);
    if (!o.event) ++losses;
  }
  return PoolSummary{
      .n_reps = outcomes.size(),
      .default_frequency = defaults.interval(),
      .mean_pool_loss = pool_loss.interval(),
      .mean_tranche_loss = tranche_loss.interval(),
      .tranche_loss_prob = wilson_interval(losses, outcomes.size()),
  };
}

CorrelationSensitivity correlation_sensitivity(const PoolSpec& low_rho, const PoolSpec& high_rho,
                                               const TrancheSpec& tranche, std::uint64_t n_reps,
                                               std::uint64_t seed, unsigned workers) {
  require(low_rho.n_loans == high_rho.n_loans && low_rho.pd == high_rho.pd && low_rho.lgd == high_rho.lgd,
          "pool", "correlation comparison needs pools identical except for rho");

  auto count_losses = [&](const PoolSpec& pool) {
    SimConfig cfg{RegimeMixture::single(pool), tranche, 0.0, SignalModel::survival_score};
    const auto outcomes = run_all(cfg, n_reps, seed, workers, false);
    return static_cast<std::uint64_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const SimOutcome& o) { return o.tranche_loss > 0.0; }));
  };
  const std::uint64_t x_low = count_losses(low_rho);
  const std::uint64_t x_high = count_losses(high_rho);

  CorrelationSensitivity cs{};
  cs.loss_prob_low = wilson_interval(x_low, n_reps);
  cs.loss_prob_high = wilson_interval(x_high, n_reps);
  cs.events_low = x_low;
  cs.events_high = x_high;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (x_low > 0 && x_high > 0) {
    const double n = static_cast<double>(n_reps);
    cs.ratio = cs.loss_prob_high.estimate / cs.loss_prob_low.estimate;
    // Katz log interval for a ratio of two binomial proportions.
    const double se = std::sqrt(1.0 / x_high - 1.0 / n + 1.0 / x_low - 1.0 / n);
    cs.ci_low = cs.ratio * std::exp(-kZ95 * se);
    cs.ci_high = cs.ratio * std::exp(kZ95 * se);
    cs.censored = false;
  } else {
    cs.censored = true;
    cs.ratio = x_low == 0 ? (x_high == 0 ? std::numeric_limits<double>::quiet_NaN() : kInf) : 0.0;
    cs.ci_low = cs.loss_prob_high.low / cs.loss_prob_low.high;
    cs.ci_high = cs.loss_prob_low.low > 0.0 ? cs.loss_prob_high.high / cs.loss_prob_low.low : kInf;
  }
  return cs;
}

std::vector<int> rank_bins(const std::vector<SimOutcome>& outcomes, int n_bins) {
  const std::size_t n = outcomes.size();
  if (n_bins < 1) throw DomainError("n_bins", "must be at least 1");
  if (static_cast<std::size_t>(n_bins) > n) {
    throw DegenerateSample("more bins (" + std::to_string(n_bins) + ") than outcomes (" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (outcomes[a].signal != outcomes[b].signal) return outcomes[a].signal < outcomes[b].signal;
    return outcomes[a].rep < outcomes[b].rep;
  });
  std::vector<int> bins(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    bins[order[rank]] = static_cast<int>((rank * static_cast<std::size_t>(n_bins)) / n);
  }
  return bins;
}

DiscreteSignalSpace binned_space(const std::vector<int>& bins, const std::vector<bool>& events, int n_bins) {
  if (bins.size() != events.size()) throw DomainError("bins", "bins and events must align");
  std::vector<std::uint64_t> c0(static_cast<std::size_t>(n_bins), 0);
  std::vector<std::uint64_t> c1(static_cast<std::size_t>(n_bins), 0);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    auto& c = events[i] ? c1 : c0;
    ++c[static_cast<std::size_t>(bins[i])];
  }
  const std::uint64_t n0 = std::accumulate(c0.begin(), c0.end(), std::uint64_t{0});
  const std::uint64_t n1 = std::accumulate(c1.begin(), c1.end(), std::uint64_t{0});
  if (n0 == 0 || n1 == 0) throw DegenerateSample("binned sample needs both E=0 and E=1 outcomes");

  std::vector<std::string> symbols;
  std::vector<double> p0;
  std::vector<double> p1;
  for (int b = 0; b < n_bins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    if (c0[i] == 0 && c1[i] > 0) {
      throw DegenerateSample("bin " + std::to_string(b) + " holds E=1 outcomes but no E=0 outcomes");
    }
    symbols.push_back("bin" + std::to_string(b));
    p0.push_back(static_cast<double>(c0[i]) / static_cast<double>(n0));
    p1.push_back(static_cast<double>(c1[i]) / static_cast<double>(n1));
  }
  return DiscreteSignalSpace(std::move(symbols), std::move(p0), std::move(p1));
}

TrancheCeilingExperiment tranche_event_ceiling_experiment(const RegimeMixture& regimes,
                                                          const TrancheSpec& shallow,
                                                          const TrancheSpec& deep,
                                                          double signal_noise_sd,
                                                          std::uint64_t n_reps, std::uint64_t seed,
                                                          int n_bins, unsigned workers) {
  shallow.validate();
  deep.validate();
  require(deep.attachment >= shallow.attachment, "tranche",
          "deep tranche must not attach below the shallow tranche");

  const SimConfig cfg{regimes, shallow, signal_noise_sd, SignalModel::survival_score};
  const auto outcomes = simulate(cfg, n_reps, seed, workers);
  const auto bins = rank_bins(outcomes, n_bins);

  std::vector<bool> shallow_events(outcomes.size());
  std::vector<bool> deep_events(outcomes.size());
  std::uint64_t n_shallow = 0;
  std::uint64_t n_deep = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    shallow_events[i] = outcomes[i].event;
    deep_events[i] = deep.loss(outcomes[i].pool_loss_fraction) == 0.0;
    n_shallow += shallow_events[i];
    n_deep += deep_events[i];
  }
  auto shallow_space = binned_space(bins, shallow_events, n_bins);
  auto deep_space = binned_space(bins, deep_events, n_bins);
  const double shallow_ceiling = esssup_lambda(shallow_space);
  const double deep_ceiling = esssup_lambda(deep_space);
  const double n = static_cast<double>(outcomes.size());
  return TrancheCeilingExperiment{std::move(shallow_space), std::move(deep_space), shallow_ceiling,
                                  deep_ceiling,             n_shallow / n,            n_deep / n};
}

}  // namespace certfeas

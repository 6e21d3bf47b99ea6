#include <doctest.h>

#include <cmath>
#include <cstring>

#include "certfeas/binormal.hpp"
#include "certfeas/error.hpp"
#include "certfeas/normal.hpp"
#include "certfeas/pool_sim.hpp"

using namespace certfeas;

namespace {

SimConfig single(PoolSpec pool, TrancheSpec tranche = {0.0, 1.0}, double sd = 0.0,
                 SignalModel model = SignalModel::survival_score) {
  return SimConfig{RegimeMixture::single(pool), tranche, sd, model};
}

bool same(const SimOutcome& a, const SimOutcome& b) {
  return a.rep == b.rep && a.regime == b.regime && a.n_defaults == b.n_defaults &&
         std::memcmp(&a.pool_loss_fraction, &b.pool_loss_fraction, sizeof(double)) == 0 &&
         std::memcmp(&a.tranche_loss, &b.tranche_loss, sizeof(double)) == 0 && a.event == b.event &&
         std::memcmp(&a.signal, &b.signal, sizeof(double)) == 0;
}

// P(more than k defaults among n) under the one-factor model, by quadrature
// over the systematic factor.
double exceedance_probability(const PoolSpec& pool, int k) {
  const double c = normal::quantile(pool.pd);
  const double h = 1e-3;
  double total = 0.0;
  for (double z = -12.0; z <= 12.0; z += h) {
    const double p = normal::cdf((c - std::sqrt(pool.rho) * z) / std::sqrt(1.0 - pool.rho));
    // binomial upper tail P(D > k)
    double pmf = std::pow(1.0 - p, pool.n_loans);
    double below = 0.0;
    for (int j = 0; j <= k; ++j) {
      below += pmf;
      pmf *= (pool.n_loans - j) / (j + 1.0) * p / (1.0 - p);
    }
    total += normal::pdf(z) * std::max(0.0, 1.0 - below) * h;
  }
  return total;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((PoolSpec{0, 0.02, 0.1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((PoolSpec{10, 0.0, 0.1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((PoolSpec{10, 0.02, 1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((PoolSpec{10, 0.02, 0.1, 1.5}.validate()), DomainError);
  CHECK_THROWS_AS((TrancheSpec{0.3, 0.3}.validate()), DomainError);
  CHECK_THROWS_AS((TrancheSpec{-0.1, 0.3}.validate()), DomainError);
  const RegimeMixture bad{{Regime{PoolSpec{}, 0.5}, Regime{PoolSpec{}, 0.4}}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(simulate(single(PoolSpec{}), 0, 1), DomainError);
  CHECK_THROWS_AS(single(PoolSpec{}, {0, 1}, -1.0).validate(), DomainError);
}

TEST_CASE("tranche loss is the clamped layer loss") {
  const TrancheSpec t{0.1, 0.3};
  CHECK(t.loss(0.0) == 0.0);
  CHECK(t.loss(0.1) == 0.0);
  CHECK(t.loss(0.2) == doctest::Approx(0.5));
  CHECK(t.loss(0.3) == doctest::Approx(1.0));
  CHECK(t.loss(0.9) == 1.0);
  const auto out = simulate(single(PoolSpec{50, 0.1, 0.3, 0.6}, t), 2000, 5);
  for (const auto& o : out) {
    CHECK(o.pool_loss_fraction == doctest::Approx(0.6 * o.n_defaults / 50.0));
    CHECK(o.tranche_loss == doctest::Approx(std::clamp((o.pool_loss_fraction - 0.1) / 0.2, 0.0, 1.0)));
    CHECK(o.event == (o.tranche_loss == 0.0));
  }
}

TEST_CASE("zero correlation: pool loss concentrates at pd * lgd") {
  const PoolSpec pool{10000, 0.02, 0.0, 0.6};
  const auto out = simulate(single(pool), 1, 2026);
  const double se = 0.6 * std::sqrt(0.02 * 0.98 / 10000.0);
  CHECK(std::fabs(out[0].pool_loss_fraction - 0.02 * 0.6) < 4.0 * se);
}

TEST_CASE("near-comonotone pool loses all or nothing") {
  const PoolSpec pool{100, 0.02, 0.999, 1.0};
  const std::uint64_t n = 20000;
  const auto out = simulate(single(pool), n, 77);
  double big = 0.0;
  for (const auto& o : out) big += o.pool_loss_fraction > 0.5 ? 1.0 : 0.0;
  const double se = std::sqrt(0.02 * 0.98 / n);
  CHECK(std::fabs(big / n - 0.02) < 4.0 * se);
}

TEST_CASE("determinism across runs and worker counts") {
  RegimeMixture mix{{Regime{PoolSpec{60, 0.03, 0.2, 0.5}, 0.8}, Regime{PoolSpec{60, 0.1, 0.4, 0.5}, 0.2}}};
  const SimConfig cfg{mix, TrancheSpec{0.05, 0.2}, 0.3, SignalModel::survival_score};
  const auto a = simulate(cfg, 5000, 99, 1);
  const auto b = simulate(cfg, 5000, 99, 3);
  const auto c = simulate(cfg, 5000, 99, 0);
  REQUIRE(a.size() == 5000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rep == i);
    CHECK(same(a[i], b[i]));
    CHECK(same(a[i], c[i]));
    CHECK(same(a[i], simulate_one(cfg, 99, i)));
  }
  const auto d = simulate(cfg, 50, 100, 1);
  bool differs = false;
  for (std::size_t i = 0; i < d.size(); ++i) differs = differs || !same(a[i], d[i]);
  CHECK(differs);
}

TEST_CASE("regime mixing at zero correlation") {
  const double w = 0.7;
  RegimeMixture mix{{Regime{PoolSpec{100, 0.01, 0.0, 1.0}, w}, Regime{PoolSpec{100, 0.05, 0.0, 1.0}, 1.0 - w}}};
  const SimConfig cfg{mix, TrancheSpec{0.0, 1.0}, 0.0, SignalModel::survival_score};
  const auto out = simulate(cfg, 100000, 3);
  const PoolSummary s = summarize(out, mix);
  const double se = (s.default_frequency.high - s.default_frequency.low) / (2.0 * 1.959963984540054);
  CHECK(std::fabs(s.default_frequency.estimate - (w * 0.01 + (1.0 - w) * 0.05)) < 4.0 * se);
  int stress = 0;
  for (const auto& o : out) stress += o.regime;
  CHECK(std::fabs(stress / 100000.0 - 0.3) < 4.0 * std::sqrt(0.21 / 100000.0));
}

TEST_CASE("Wilson interval") {
  const auto z = wilson_interval(0, 10);
  CHECK(z.low == 0.0);
  CHECK(z.high == doctest::Approx(0.27753279986288).epsilon(1e-10));
  const auto h = wilson_interval(5, 10);
  CHECK(h.low == doctest::Approx(0.23659309051).epsilon(1e-9));
  CHECK(h.high == doctest::Approx(0.76340690949).epsilon(1e-9));
  CHECK(wilson_interval(10, 10).high == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(wilson_interval(0, 0), DegenerateSample);
}

TEST_CASE("empirical metrics and the count-level Bayes identity") {
  const auto out = simulate(single(PoolSpec{100, 0.02, 0.2, 1.0}, {0.03, 0.1}, 0.4), 50000, 8);
  const auto all = estimate_metrics(out, -std::numeric_limits<double>::infinity());
  CHECK(all.sensitivity.estimate == 1.0);
  CHECK(all.fpr.estimate == 1.0);

  for (double target : {0.5, 0.1, 0.02}) {
    const double t = threshold_for_fpr(out, target);
    const auto m = estimate_metrics(out, t);
    CHECK(m.fpr.estimate == doctest::Approx(std::round(target * m.n_failure) / m.n_failure).epsilon(1e-12));
    const double pi = m.base_rate.estimate;
    const double s = m.sensitivity.estimate;
    const double f = m.fpr.estimate;
    REQUIRE(m.ppv);
    CHECK(m.ppv->estimate * (s * pi + f * (1.0 - pi)) == doctest::Approx(s * pi).epsilon(1e-12));
    REQUIRE(m.lambda);
    CHECK(ppv_from_lambda(BaseRate(pi), Discrimination::finite(m.lambda->estimate)).value() ==
          doctest::Approx(m.ppv->estimate).epsilon(1e-12));
    CHECK(m.lambda->low <= m.lambda->estimate);
    CHECK(m.lambda->estimate <= m.lambda->high);
  }

  std::vector<SimOutcome> only_safe;
  for (const auto& o : out) {
    if (o.event) only_safe.push_back(o);
  }
  CHECK_THROWS_AS(estimate_metrics(only_safe, 0.0), DegenerateSample);
}

TEST_CASE("event-indicator signal is binormal") {
  const double d = 1.5;
  const auto out = simulate(single(PoolSpec{100, 0.02, 0.2, 1.0}, {0.03, 0.1}, 1.0 / d, SignalModel::event_indicator),
                            200000, 12);
  const auto m = estimate_metrics(out, threshold_for_fpr(out, 0.01));
  const double predicted = lambda_at_fpr(BinormalModel(d), m.fpr.estimate).lambda;
  REQUIRE(m.lambda);
  CHECK(m.lambda->low <= predicted);
  CHECK(predicted <= m.lambda->high);
}

TEST_CASE("senior loss probability matches quadrature") {
  const PoolSpec pool{100, 0.02, 0.45, 1.0};
  const TrancheSpec t{0.15, 1.0};
  const auto out = simulate(single(pool, t), 100000, 4);
  const PoolSummary s = summarize(out, RegimeMixture::single(pool));
  const double exact = exceedance_probability(pool, 15);
  CHECK(s.tranche_loss_prob.low <= exact);
  CHECK(exact <= s.tranche_loss_prob.high);
}

TEST_CASE("correlation sensitivity") {
  const TrancheSpec senior{0.15, 1.0};
  const PoolSpec p{100, 0.02, 0.25, 1.0};
  const auto same_rho = correlation_sensitivity(p, p, senior, 20000, 6);
  CHECK(same_rho.ratio == doctest::Approx(1.0));
  CHECK(same_rho.ci_low <= 1.0);
  CHECK(same_rho.ci_high >= 1.0);

  // Equity: P(any default) moves little with rho when pd * n is small.
  const TrancheSpec equity{0.0, 0.05};
  const PoolSpec lo{20, 0.002, 0.05, 1.0};
  const PoolSpec hi{20, 0.002, 0.45, 1.0};
  const auto eq = correlation_sensitivity(lo, hi, equity, 100000, 6);
  const double exact = exceedance_probability(hi, 0) / exceedance_probability(lo, 0);
  CHECK(exact > 0.5);
  CHECK(exact < 1.0);
  CHECK(eq.ci_low <= exact);
  CHECK(exact <= eq.ci_high);

  const PoolSpec other{100, 0.03, 0.25, 1.0};
  CHECK_THROWS_AS(correlation_sensitivity(p, other, senior, 10, 1), DomainError);

  // Censoring when the low-correlation pool never loses.
  const auto cens = correlation_sensitivity(PoolSpec{100, 0.02, 0.0, 1.0}, PoolSpec{100, 0.02, 0.45, 1.0},
                                            TrancheSpec{0.3, 1.0}, 2000, 2);
  CHECK(cens.censored);
  CHECK(cens.events_low == 0);
  CHECK(cens.ci_low > 0.0);
}

TEST_CASE("rank bins nest and coarsening never raises the ceiling") {
  const auto out = simulate(single(PoolSpec{100, 0.02, 0.2, 1.0}, {0.03, 0.1}, 1.5), 100000, 21);
  const auto fine = rank_bins(out, 20);
  const auto coarse = rank_bins(out, 10);
  const auto one = rank_bins(out, 1);
  std::vector<bool> events;
  for (const auto& o : out) events.push_back(o.event);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(coarse[i] == fine[i] / 2);
    CHECK(one[i] == 0);
  }
  const double c_fine = esssup_lambda(binned_space(fine, events, 20));
  const double c_coarse = esssup_lambda(binned_space(coarse, events, 10));
  CHECK(c_coarse <= c_fine);
  CHECK(esssup_lambda(binned_space(one, events, 1)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rank_bins(out, 0), DomainError);
}

TEST_CASE("tranche event ceiling experiment") {
  const auto mix = RegimeMixture::single(PoolSpec{100, 0.02, 0.2, 1.0});
  const TrancheSpec shallow{0.03, 0.10};
  const auto same_tranche = tranche_event_ceiling_experiment(mix, shallow, shallow, 1.5, 50000, 3, 5);
  CHECK(same_tranche.shallow_ceiling == same_tranche.deep_ceiling);
  CHECK(same_tranche.shallow_space.p0() == same_tranche.deep_space.p0());
  CHECK(same_tranche.shallow_space.p1() == same_tranche.deep_space.p1());

  const auto flat = tranche_event_ceiling_experiment(mix, shallow, TrancheSpec{0.08, 0.15}, 1.5, 50000, 3, 1);
  CHECK(flat.shallow_ceiling == doctest::Approx(1.0));
  CHECK(flat.deep_ceiling == doctest::Approx(1.0));
  CHECK(flat.deep_base_rate >= flat.shallow_base_rate);

  CHECK_THROWS_AS(tranche_event_ceiling_experiment(mix, TrancheSpec{0.08, 0.15}, shallow, 1.5, 100, 3, 5),
                  DomainError);
  // No noise and many bins: the top bins hold no failures.
  CHECK_THROWS_AS(tranche_event_ceiling_experiment(mix, shallow, TrancheSpec{0.08, 0.15}, 0.0, 20000, 3, 50),
                  DegenerateSample);
}

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "certfeas/binormal.hpp"
#include "certfeas/bounds.hpp"
#include "certfeas/discrete_lab.hpp"
#include "certfeas/io.hpp"
#include "certfeas/moment_lab.hpp"
#include "certfeas/pool_sim.hpp"
#include "certfeas/report.hpp"
#include "support/random_space.hpp"

using namespace certfeas;

namespace {

constexpr std::uint64_t kFrozenSeed = 20261015;
constexpr std::uint64_t kFrozenReps = 1000000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail += "; ";
      else detail.clear();
      pass = false;
      detail += what;
    }
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<std::string> column(const report::Table& t, const std::string& name) {
  std::vector<std::string> out;
  const auto c = t.column(name);
  for (const auto& r : t.rows) out.push_back(r[c]);
  return out;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " | ") + x;
  return s;
}

Outcome table1() {
  Outcome o;
  const ReliabilityTarget tau(0.9999);
  const std::array<double, 5> pis{0.90, 0.70, 0.50, 0.30, 0.10};
  // tau/(1-tau) * (1-pi)/pi with tau/(1-tau) = 9999
  const std::array<double, 5> exact{1111.0, 9999.0 * 3.0 / 7.0, 9999.0, 23331.0, 89991.0};
  for (std::size_t i = 0; i < pis.size(); ++i) {
    const double v = lambda_required(tau, BaseRate(pis[i]));
    o.require(rel(v, exact[i]) <= 1e-9, "pi=" + num(pis[i]) + " gives " + num(v));
  }
  const std::vector<std::string> want{"1,100", "4,300", "10,000", "23,300", "90,000"};
  const auto got = column(report::table1(), "lambda_req_display");
  o.require(got == want, "display " + joined(got));
  o.detail = o.pass ? "display " + joined(got) : o.detail;
  return o;
}

Outcome table2() {
  Outcome o;
  const std::array<double, 4> aucs{0.85, 0.90, 0.95, 0.99};
  const std::array<double, 4> dprimes{1.47, 1.81, 2.33, 3.29};
  const std::array<double, 4> l3{52, 101, 222, 579};
  const std::array<double, 4> l4{121, 283, 818, 3339};
  std::string cells;
  for (std::size_t i = 0; i < aucs.size(); ++i) {
    const auto m = BinormalModel::from_auc(aucs[i]);
    const double a = lambda_at_fpr(m, 1e-3).lambda;
    const double b = lambda_at_fpr(m, 1e-4).lambda;
    o.require(std::fabs(m.dprime() - dprimes[i]) <= 0.01, "d'=" + num(m.dprime()));
    o.require(std::fabs(a - l3[i]) <= 1.0, "AUC " + num(aucs[i]) + " F=1e-3: " + num(a));
    o.require(std::fabs(b - l4[i]) <= 1.0, "AUC " + num(aucs[i]) + " F=1e-4: " + num(b));
    cells += (cells.empty() ? "" : " ") + std::to_string(std::lround(a)) + "/" + std::to_string(std::lround(b));
  }
  if (o.pass) o.detail = "Lambda " + cells;
  return o;
}

Outcome table3() {
  Outcome o;
  const auto t = report::table3();
  const auto pi = column(t, "min_pi_display");
  const auto r50 = column(t, "lambda_req_pi_0.50_display");
  const auto r30 = column(t, "lambda_req_pi_0.30_display");
  o.require(pi == std::vector<std::string>{"0.50", "0.67", "0.91", "0.99"}, "min pi " + joined(pi));
  o.require(r50 == std::vector<std::string>{"99", "199", "999", "10,000"}, "pi=0.50 " + joined(r50));
  o.require(r30 == std::vector<std::string>{"231", "464", "2,331", "23,300"}, "pi=0.30 " + joined(r30));
  // the displayed minimum base rate comes from the library call itself
  const std::array<double, 4> taus{0.99, 0.995, 0.999, 0.9999};
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double v = rescue_min_base_rate(ReliabilityTarget(taus[i]), 100.0).value();
    o.require(report::display_decimals(v, 2) == pi[i], "rescue pi mismatch at tau=" + num(taus[i]));
  }
  if (o.pass) o.detail = "min pi " + joined(pi);
  return o;
}

Outcome table4() {
  Outcome o;
  const auto psi = column(report::table4(), "psi_display");
  o.require(psi == std::vector<std::string>{"100", "200", "500", "233", "466", "900"}, "psi " + joined(psi));
  const auto v = assess({ReliabilityTarget(0.9999), BaseRate(0.5), Discrimination::finite(100.0), std::nullopt});
  o.require(!v.feasible, "pi=0.5, ceiling 100 reported feasible");
  o.require(std::fabs(v.max_ppv.value() - 0.9901) < 5e-5, "max PPV " + num(v.max_ppv.value()));
  o.require(v.max_ppv.value() < 0.9999, "max PPV not below target");
  if (o.pass) o.detail = "psi " + joined(psi) + "; max PPV " + num(v.max_ppv.value()) + ", infeasible";
  return o;
}

Outcome deficit() {
  Outcome o;
  const double a = prior_free_deficit(0.10, ReliabilityTarget(0.9999));
  const double b = prior_free_deficit(0.10, ReliabilityTarget(0.999));
  const double c = achieved_discrimination(0.90, BaseRate(0.50));
  o.require(rel(a, 89991.0) <= 1e-12, "tau=0.9999 gives " + num(a));
  o.require(rel(b, 8991.0) <= 1e-12, "tau=0.999 gives " + num(b));
  o.require(rel(c, 1.0 / 9.0) <= 1e-12, "Lambda_ach gives " + num(c));
  if (o.pass) o.detail = num(a) + ", " + num(b) + ", Lambda_ach " + num(c);
  return o;
}

Outcome theorem_suite() {
  Outcome o;
  std::mt19937_64 rng(kFrozenSeed);
  std::uniform_int_distribution<int> size(2, 10);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int rules = 0;
  int coverage_checks = 0;
  for (int trial = 0; trial < 1000 && o.pass; ++trial) {
    const auto s = testing::random_space(rng, static_cast<std::size_t>(size(rng)));
    const BaseRate pi(u(rng));
    const double top = esssup_lambda(s);
    const std::size_t n = s.size();
    const std::string tag = "space " + std::to_string(trial) + ": ";

    // (a) every deterministic rule, plus random randomized ones
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      RandomizedRule r{std::vector<double>(n, 0.0)};
      for (std::size_t i = 0; i < n; ++i) r.accept_prob[i] = (mask >> i) & 1U ? 1.0 : 0.0;
      const auto ev = evaluate_rule(s, r, pi);
      ++rules;
      if (ev.lambda) o.require(*ev.lambda <= top * (1.0 + 1e-12), tag + "rule above ceiling");
    }
    for (int k = 0; k < 50; ++k) {
      RandomizedRule r{std::vector<double>(n)};
      for (auto& a : r.accept_prob) a = unit(rng);
      const auto ev = evaluate_rule(s, r, pi);
      ++rules;
      if (ev.lambda) o.require(*ev.lambda <= top * (1.0 + 1e-12), tag + "randomized rule above ceiling");
    }

    // (b) exhaustive maximum PPV against the closed form
    const auto oracle = brute_force_oracle(s, pi);
    const double closed = ppv_from_lambda(pi, Discrimination::finite(top)).value();
    o.require(std::fabs(oracle.max_ppv - closed) <= 1e-12, tag + "max PPV " + num(oracle.max_ppv) + " vs " + num(closed));
    o.require(std::fabs(oracle.max_lambda - top) <= 1e-12 * top, tag + "oracle ceiling differs");

    // (c) near-optimal rule
    const double eps = unit(rng) * top;
    if (eps > 0.0) {
      const auto ev = evaluate_rule(s, near_optimal_rule(s, eps), pi);
      o.require(*ev.lambda >= top - eps, tag + "near-optimal rule short of esssup - eps");
    }

    // (d) pushforward through a random coarsening
    std::map<std::string, std::string> m;
    const auto groups = 1 + rng() % n;
    for (const auto& sym : s.symbols()) m[sym] = "g" + std::to_string(rng() % groups);
    o.require(esssup_lambda(pushforward(s, m)) <= top * (1.0 + 1e-12), tag + "pushforward raised the ceiling");

    // (e) coverage greedy against the alpha grid
    if (n <= kOracleMaxSymbolsCoverage) {
      const double q = 0.05 + 0.9 * unit(rng);
      const auto g = check_coverage_against_grid(s, pi, q);
      ++coverage_checks;
      o.require(g.agrees, tag + "coverage greedy " + num(g.greedy_lambda) + ", grid " + num(g.grid_lambda) +
                              ", floor " + num(g.resolution_floor));
    }
  }
  if (o.pass) {
    o.detail = "1000 spaces, " + std::to_string(rules) + " rules, " + std::to_string(coverage_checks) +
               " coverage grid checks";
  }
  return o;
}

Outcome bayes_consistency() {
  Outcome o;
  const auto cfg = io::pool_config_from_json(io::read_json(CERTFEAS_SOURCE_DIR "/configs/binormal_matched.json"));
  const auto out = simulate(cfg.sim, kFrozenReps, kFrozenSeed);
  const auto m = estimate_metrics(out, threshold_for_fpr(out, cfg.target_fpr.value_or(1e-3)));
  if (!m.ppv || !m.lambda) {
    o.require(false, "rule accepted nothing or no failures");
    return o;
  }
  // count identity: TP / (TP + FP) against S*pi / (S*pi + F*(1 - pi))
  const double pi = m.base_rate.estimate;
  const double s = m.sensitivity.estimate;
  const double f = m.fpr.estimate;
  o.require(std::fabs(m.ppv->estimate * (s * pi + f * (1.0 - pi)) - s * pi) <= 1e-15,
            "count-level Bayes identity off");
  const double bayes = ppv_from_lambda(BaseRate(pi), Discrimination::finite(m.lambda->estimate)).value();
  o.require(std::fabs(bayes - m.ppv->estimate) <= 1e-12, "ppv_from_lambda " + num(bayes) + " vs " + num(m.ppv->estimate));

  const BinormalModel model(1.0 / cfg.sim.signal_noise_sd);
  const double predicted = lambda_at_fpr(model, f).lambda;
  o.require(m.lambda->low <= predicted && predicted <= m.lambda->high,
            "binormal prediction " + num(predicted) + " outside [" + num(m.lambda->low) + ", " +
                num(m.lambda->high) + "]");
  o.require(std::fabs(f - 1e-3) <= 1e-5, "empirical F " + num(f));
  if (o.pass) {
    o.detail = "F=" + num(f) + ", Lambda " + num(m.lambda->estimate) + " in [" + num(m.lambda->low) + ", " +
               num(m.lambda->high) + "], binormal " + num(predicted);
  }
  return o;
}

Outcome correlation() {
  Outcome o;
  const auto cfg =
      io::pool_config_from_json(io::read_json(CERTFEAS_SOURCE_DIR "/configs/correlation_sensitivity.json"));
  PoolSpec low = cfg.sim.regimes.regimes.at(0).pool;
  PoolSpec high = low;
  low.rho = cfg.compare_rho->first;
  high.rho = cfg.compare_rho->second;
  o.require(low.rho == 0.05 && high.rho == 0.45, "frozen config does not compare 0.05 with 0.45");
  const auto c = correlation_sensitivity(low, high, cfg.sim.tranche, kFrozenReps, kFrozenSeed);
  o.require(!c.censored, "censored ratio");
  o.require(c.ci_low >= 10.0, "95% lower bound " + num(c.ci_low));
  if (o.pass) {
    o.detail = "ratio " + num(c.ratio) + ", 95% CI [" + num(c.ci_low) + ", " + num(c.ci_high) + "], events " +
               std::to_string(c.events_low) + " vs " + std::to_string(c.events_high);
  }
  return o;
}

Outcome moment_lab() {
  Outcome o;
  std::mt19937_64 rng(kFrozenSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double eps = 0.05 + 0.85 * u(rng);
    const double a = (eps / 2.0) * (0.01 + 0.99 * u(rng));
    const double b = a + (1.0 - a) * (0.01 + 0.98 * u(rng));
    const double eta = (eps / 2.0) * (0.01 + 0.98 * u(rng));
    const int m = 1 + static_cast<int>(u(rng) * 8);
    const auto rep = verify_pair(construct_case1(a, b, eta, eps), m, eps, default_r_list(m));
    o.require(rep.deviation_ok && rep.bounds_ok, "case 1 draw " + std::to_string(k));
  }
  for (int k = 0; k < 100; ++k) {
    const double eps = 0.05 + 0.85 * u(rng);
    const int m = 1 + static_cast<int>(u(rng) * 8);
    const MomentOracle base =
        k % 2 == 0 ? MomentOracle::uniform() : MomentOracle::beta(0.5 + 4.0 * u(rng), 0.5 + 4.0 * u(rng));
    const auto rep = verify_pair(construct_case2(base, m, eps), m, eps, default_r_list(m));
    o.require(rep.deviation_ok && rep.bounds_ok, "case 2 draw " + std::to_string(k));
  }

  const auto c1 = verify_pair(construct_case1(0.2, 0.5, 0.2, 0.5), 5, 0.5, {5});
  const double r5 = std::exp(c1.ratios[0].log_ratio);
  o.require(rel(r5, 0.8 + 0.2 * std::pow(2.5, 5)) <= 1e-6, "case 1 r=5 ratio " + num(r5));
  o.require(std::fabs(r5 - 20.33) < 0.005, "case 1 r=5 ratio " + num(r5));

  const auto c2 = verify_pair(construct_case2(MomentOracle::uniform(), 2, 0.2), 2, 0.2, {200});
  const double r200 = std::exp(c2.ratios[0].log_ratio);
  const double bound = std::exp(*c2.ratios[0].log_lower_bound);
  const double growth = std::pow(0.975 / 0.95, 200);
  o.require(rel(bound, 0.1 * growth) <= 1e-6, "case 2 bound " + num(bound));
  o.require(rel(r200, 0.9 + 0.1 * 201.0 * growth) <= 1e-6, "case 2 ratio " + num(r200));
  o.require(r200 >= bound && r200 >= 18.05, "case 2 ratio below bound");
  o.require(std::fabs(r200 - 3.6e3) < 0.05e3, "case 2 ratio " + num(r200));
  if (o.pass) o.detail = "r=5 ratio " + num(r5) + "; r=200 ratio " + num(r200) + " >= bound " + num(bound);
  return o;
}

Outcome figure1() {
  Outcome o;
  const auto t = report::figure1();
  const auto names = column(t, "asset_class");
  const auto req = column(t, "lambda_req_display");
  const auto avail = column(t, "lambda_avail");
  const auto ach = column(t, "lambda_ach_display");
  o.require(names == std::vector<std::string>{"Corporate AAA", "Pre-Crisis CDOs", "Contemporary CLOs"},
            "rows " + joined(names));
  o.require(req == std::vector<std::string>{"101", "10000", "15000"}, "Lambda_req " + joined(req));
  o.require(avail == std::vector<std::string>{"300", "100", "80"}, "Lambda_avail " + joined(avail));
  o.require(ach.size() == 3 && ach[1] == "0.11", "CDO Lambda_ach " + (ach.size() > 1 ? ach[1] : ""));

  // rows agree with the bundled scenario definitions
  const auto& sc = report::bundled_scenarios();
  const auto full_req = column(t, "lambda_req");
  for (std::size_t i = 0; i < sc.size() && i < full_req.size(); ++i) {
    const double v = lambda_required(ReliabilityTarget(sc[i].tau), BaseRate(sc[i].pi.point));
    o.require(std::stod(full_req[i]) == v, "scenario mismatch for " + sc[i].name);
    o.require(std::stod(avail[i]) == sc[i].lambda_avail.point, "ceiling mismatch for " + sc[i].name);
  }
  if (o.pass) o.detail = "(" + joined(req) + ") x (" + joined(avail) + "), CDO Lambda_ach " + ach[1];
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Table 1 required discrimination", 1.0, table1},
      {2, "Table 2 binormal discrimination", 1.0, table2},
      {3, "Table 3 rescue base rates", 1.0, table3},
      {4, "Table 4 tension ratios and infeasible verdict", 1.0, table4},
      {5, "prior-free deficit and achieved discrimination", 1.0, deficit},
      {6, "theorem suite on random discrete spaces", 120.0, theorem_suite},
      {7, "Monte Carlo Bayes consistency", 60.0, bayes_consistency},
      {8, "correlation sensitivity ratio >= 10", 120.0, correlation},
      {9, "moment insufficiency constructions", 10.0, moment_lab},
      {10, "Figure 1 data series", 1.0, figure1},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + num(c.budget_s) + " s budget)";
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] criterion %2d: %s (%.2f s) - %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

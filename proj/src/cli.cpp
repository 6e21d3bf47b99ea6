#include "certfeas/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "certfeas/binormal.hpp"
#include "certfeas/bounds.hpp"
#include "certfeas/discrete_lab.hpp"
#include "certfeas/error.hpp"
#include "certfeas/io.hpp"
#include "certfeas/moment_lab.hpp"
#include "certfeas/pool_sim.hpp"
#include "certfeas/report.hpp"

#ifndef CERTFEAS_VERSION
#define CERTFEAS_VERSION "unknown"
#endif

namespace certfeas {

namespace {

using nlohmann::json;
using report::full;

// Raised when a cross-check between two independent computations fails.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json optional_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

Discrimination parse_ceiling(const std::string& text) {
  if (text == "inf" || text == "infinity") return Discrimination::infinite();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw DomainError("lambda-avail", "expected a positive number or 'inf', got '" + text + "'");
  }
  return Discrimination::finite(v);
}

// Output goes to --out when given, else to the command's stream.
void emit(const std::string& body, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << body;
  if (!f) throw std::runtime_error("write failed for " + path);
}

// ---- bounds ----

struct BoundsArgs {
  double tau = 0.0;
  double pi = 0.0;
  std::string lambda_avail;
  std::optional<double> coverage;
  std::optional<double> ppv_obs;
  std::string format = "json";
};

void cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const ReliabilityTarget tau(a.tau);
  const BaseRate pi(a.pi);
  const Discrimination ceiling = parse_ceiling(a.lambda_avail);
  const FeasibilityVerdict v = assess({tau, pi, ceiling, a.coverage});

  std::optional<double> rescue;
  if (ceiling.is_finite()) rescue = rescue_min_base_rate(tau, ceiling.value()).value();
  std::optional<double> deficit;
  std::optional<double> achieved;
  if (a.ppv_obs) {
    deficit = prior_free_deficit(*a.ppv_obs, tau);
    achieved = achieved_discrimination(1.0 - *a.ppv_obs, pi);
  }

  if (a.format == "csv") {
    report::Table t{{"quantity", "value"}, {}};
    auto row = [&](const std::string& k, const std::string& v) { t.rows.push_back({k, v}); };
    row("tau", full(a.tau));
    row("pi", full(a.pi));
    row("lambda_avail", full(ceiling.value()));
    row("lambda_avail_kind", a.coverage ? "coverage-constrained" : "unconstrained");
    row("coverage_q", a.coverage ? full(*a.coverage) : "");
    row("lambda_req", full(v.lambda_req));
    row("max_ppv", full(v.max_ppv.value()));
    row("tension_ratio", full(v.tension_psi));
    row("feasible", v.feasible ? "true" : "false");
    row("rescue_min_base_rate", rescue ? full(*rescue) : "");
    if (a.ppv_obs) {
      row("ppv_obs", full(*a.ppv_obs));
      row("lambda_ach", full(*achieved));
      row("prior_free_deficit", full(*deficit));
    }
    out << report::to_csv(t);
    return;
  }

  json j = {
      {"tau", a.tau},
      {"pi", a.pi},
      {"lambda_avail", ceiling.is_finite() ? json(ceiling.value()) : json("inf")},
      {"lambda_avail_kind", a.coverage ? "coverage-constrained" : "unconstrained"},
      {"coverage_q", optional_json(a.coverage)},
      {"lambda_req", v.lambda_req},
      {"max_ppv", v.max_ppv.value()},
      {"tension_ratio", v.tension_psi},
      {"feasible", v.feasible},
      {"rescue_min_base_rate", optional_json(rescue)},
  };
  if (a.ppv_obs) {
    j["ppv_obs"] = *a.ppv_obs;
    j["lambda_ach"] = *achieved;
    j["prior_free_deficit"] = *deficit;
  }
  out << j.dump(2) << '\n';
}

// ---- table ----

void cmd_table(int id, const std::string& path, std::ostream& out) {
  emit(report::to_csv(report::table(id)), path, out);
}

// ---- binormal ----

struct BinormalArgs {
  std::optional<double> auc;
  std::optional<double> dprime;
  std::vector<double> fprs;
};

void cmd_binormal(const BinormalArgs& a, std::ostream& out) {
  const BinormalModel model = a.auc ? BinormalModel::from_auc(*a.auc) : BinormalModel(*a.dprime);
  report::Table t{{"dprime", "auc", "fpr", "threshold", "sensitivity", "lambda"}, {}};
  for (double f : a.fprs) {
    const ThresholdPoint p = lambda_at_fpr(model, f);
    t.rows.push_back({full(model.dprime()), full(model.auc()), full(p.fpr), full(p.threshold),
                      full(p.sensitivity), full(p.lambda)});
  }
  out << report::to_csv(t);
}

// ---- ceiling ----

struct CeilingArgs {
  std::string space;
  double pi = 0.0;
  std::optional<double> coverage;
  bool oracle = false;
};

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

void cmd_ceiling(const CeilingArgs& a, std::ostream& out) {
  const DiscreteSignalSpace space = io::space_from_json(io::read_json(a.space));
  const BaseRate pi(a.pi);
  const double top = esssup_lambda(space);
  const double best_ppv = max_ppv_exact(space, pi).value();

  json ratios = json::object();
  for (const auto& r : likelihood_ratios(space)) ratios[r.symbol] = r.ratio;
  json j = {
      {"symbols", space.symbols()},
      {"pi", a.pi},
      {"likelihood_ratios", ratios},
      {"esssup_lambda", top},
      {"max_ppv", best_ppv},
  };

  bool agree = true;
  if (a.coverage) {
    const CoverageCeiling c = coverage_constrained_ceiling(space, pi, *a.coverage);
    json witness = json::object();
    for (std::size_t i = 0; i < space.size(); ++i) witness[space.symbols()[i]] = c.witness.accept_prob[i];
    j["coverage"] = {{"q", *a.coverage}, {"lambda", c.lambda}, {"issuance", c.issuance}, {"witness", witness}};
  }
  if (a.oracle) {
    const OracleResult o = brute_force_oracle(space, pi);
    const bool ok = close(o.max_lambda, top) && close(o.max_ppv, best_ppv);
    json oj = {{"max_lambda", o.max_lambda}, {"max_ppv", o.max_ppv}, {"agrees", ok}};
    agree = agree && ok;
    if (a.coverage) {
      const CoverageGridCheck g = check_coverage_against_grid(space, pi, *a.coverage);
      oj["coverage"] = {{"grid_step", kOracleGridStep},
                        {"grid_lambda", g.grid_lambda},
                        {"resolution_floor", g.resolution_floor},
                        {"agrees", g.agrees}};
      agree = agree && g.agrees;
    }
    j["oracle"] = std::move(oj);
  }
  out << j.dump(2) << '\n';
  if (!agree) throw CheckFailure("oracle disagrees with the exact ceiling");
}

// ---- simulate ----

struct SimulateArgs {
  std::string config;
  std::uint64_t seed = 0;
  long long reps = 0;
  unsigned workers = 0;
  std::optional<double> target_fpr;
  std::vector<double> compare_rho;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.reps < 1) throw DomainError("reps", "must be at least 1");
  io::PoolConfig cfg = io::pool_config_from_json(io::read_json(a.config));
  if (a.target_fpr) cfg.target_fpr = a.target_fpr;
  if (!a.compare_rho.empty()) cfg.compare_rho = std::pair{a.compare_rho.at(0), a.compare_rho.at(1)};
  const auto n = static_cast<std::uint64_t>(a.reps);

  report::Table t{{"name", "estimate", "ci_low", "ci_high", "n_reps", "seed"}, {}};
  auto row = [&](const std::string& name, double est, std::optional<double> lo, std::optional<double> hi) {
    t.rows.push_back({name, full(est), lo ? full(*lo) : "", hi ? full(*hi) : "", std::to_string(n),
                      std::to_string(a.seed)});
  };
  auto interval_row = [&](const std::string& name, const Interval& iv) { row(name, iv.estimate, iv.low, iv.high); };

  const auto outcomes = simulate(cfg.sim, n, a.seed, a.workers);
  const PoolSummary s = summarize(outcomes, cfg.sim.regimes);
  interval_row("default_frequency", s.default_frequency);
  interval_row("mean_pool_loss", s.mean_pool_loss);
  interval_row("mean_tranche_loss", s.mean_tranche_loss);
  interval_row("tranche_loss_prob", s.tranche_loss_prob);

  if (cfg.target_fpr) {
    const double threshold = threshold_for_fpr(outcomes, *cfg.target_fpr);
    const EmpiricalMetrics m = estimate_metrics(outcomes, threshold);
    row("threshold", threshold, std::nullopt, std::nullopt);
    interval_row("base_rate", m.base_rate);
    interval_row("sensitivity", m.sensitivity);
    interval_row("fpr", m.fpr);
    if (m.lambda) interval_row("lambda", *m.lambda);
    if (m.ppv) {
      interval_row("ppv", *m.ppv);
      if (m.lambda) {
        const double bayes =
            ppv_from_lambda(BaseRate(m.base_rate.estimate), Discrimination::finite(m.lambda->estimate)).value();
        row("ppv_from_lambda", bayes, std::nullopt, std::nullopt);
        if (std::fabs(bayes - m.ppv->estimate) > 1e-12) {
          emit(report::to_csv(t), a.out, out);
          throw CheckFailure("empirical PPV departs from the Bayes form on realized counts");
        }
      }
    }
  }

  if (cfg.compare_rho) {
    if (cfg.sim.regimes.regimes.size() != 1) throw DomainError("compare_rho", "needs a single-regime config");
    PoolSpec low = cfg.sim.regimes.regimes[0].pool;
    PoolSpec high = low;
    low.rho = cfg.compare_rho->first;
    high.rho = cfg.compare_rho->second;
    low.validate();
    high.validate();
    const CorrelationSensitivity c = correlation_sensitivity(low, high, cfg.sim.tranche, n, a.seed, a.workers);
    interval_row("loss_prob_rho_low", c.loss_prob_low);
    interval_row("loss_prob_rho_high", c.loss_prob_high);
    row("correlation_ratio", c.ratio, c.ci_low, c.ci_high);
    row("correlation_ratio_censored", c.censored ? 1.0 : 0.0, std::nullopt, std::nullopt);
  }

  if (cfg.ceiling_experiment) {
    const auto& ce = *cfg.ceiling_experiment;
    const TrancheSpec deep{ce.deep_attachment, ce.deep_detachment};
    const TrancheCeilingExperiment e = tranche_event_ceiling_experiment(
        cfg.sim.regimes, cfg.sim.tranche, deep, cfg.sim.signal_noise_sd, n, a.seed, ce.n_bins, a.workers);
    row("shallow_base_rate", e.shallow_base_rate, std::nullopt, std::nullopt);
    row("deep_base_rate", e.deep_base_rate, std::nullopt, std::nullopt);
    row("shallow_ceiling", e.shallow_ceiling, std::nullopt, std::nullopt);
    row("deep_ceiling", e.deep_ceiling, std::nullopt, std::nullopt);
  }

  emit(report::to_csv(t), a.out, out);
}

// ---- moments ----

struct MomentsArgs {
  int which = 0;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> eta;
  double epsilon = 0.0;
  std::string base = "uniform";
  std::optional<int> max_moment;
  std::vector<int> r_list;
};

MomentOracle parse_base(const std::string& text) {
  if (text == "uniform") return MomentOracle::uniform();
  auto params = [&](std::size_t skip) {
    std::vector<double> v;
    std::stringstream ss(text.substr(skip));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        v.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw DomainError("base", "bad number '" + item + "'");
      }
    }
    return v;
  };
  if (text.rfind("beta:", 0) == 0) {
    const auto v = params(5);
    if (v.size() != 2) throw DomainError("base", "expected beta:A,B");
    return MomentOracle::beta(v[0], v[1]);
  }
  if (text.rfind("point:", 0) == 0) {
    const auto v = params(6);
    if (v.size() != 1) throw DomainError("base", "expected point:C");
    return MomentOracle::point_mass(v[0]);
  }
  throw DomainError("base", "expected uniform, beta:A,B or point:C, got '" + text + "'");
}

void cmd_moments(const MomentsArgs& args, std::ostream& out) {
  std::optional<MomentPair> pair;
  int m = 0;
  json construction;
  if (args.which == 1) {
    std::vector<std::string> missing;
    if (!args.a) missing.emplace_back("-a");
    if (!args.b) missing.emplace_back("-b");
    if (!args.eta) missing.emplace_back("--eta");
    if (!missing.empty()) {
      std::string list;
      for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
      throw DomainError("case", "case 1 needs " + list);
    }
    pair = construct_case1(*args.a, *args.b, *args.eta, args.epsilon);
    m = args.max_moment.value_or(5);
    construction = {{"case", 1}, {"a", pair->a}, {"b", pair->b}, {"eta", pair->eta}};
  } else {
    if (!args.max_moment) throw DomainError("M", "case 2 needs -M");
    const MomentOracle base = parse_base(args.base);
    pair = construct_case2(base, *args.max_moment, args.epsilon);
    m = *args.max_moment;
    construction = {{"case", 2}, {"base", base.name()}, {"eta", pair->eta}, {"delta", pair->delta}};
  }
  const std::vector<int> r_list = args.r_list.empty() ? default_r_list(m) : args.r_list;
  const MomentReport rep = verify_pair(*pair, m, args.epsilon, r_list);
  json j = io::to_json(rep);
  j["construction"] = construction;
  out << j.dump(2) << '\n';
  if (!rep.valid()) throw CheckFailure("construction violates its own guarantees");
}

// ---- report ----

void cmd_report(const std::string& dir, std::ostream& out) {
  for (const auto& p : report::write_bundle(dir, CERTFEAS_VERSION)) out << p.string() << '\n';
}

}  // namespace

const char* version() noexcept { return CERTFEAS_VERSION; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feasibility bounds for binary certification rules", "certfeas"};
  app.set_version_flag("--version", std::string(CERTFEAS_VERSION));
  app.require_subcommand(1);

  std::function<void()> action;

  BoundsArgs bounds;
  auto* sb = app.add_subcommand("bounds", "Required discrimination, max PPV and tension ratio");
  sb->add_option("--tau", bounds.tau, "Precision target in (0, 1)")->required();
  sb->add_option("--pi", bounds.pi, "Base rate in (0, 1)")->required();
  sb->add_option("--lambda-avail", bounds.lambda_avail, "Discrimination ceiling (number or inf)")->required();
  sb->add_option("--coverage", bounds.coverage, "Minimum issuance q the ceiling was computed at");
  sb->add_option("--ppv-obs", bounds.ppv_obs, "Observed precision, for the prior-free deficit");
  sb->add_option("--format", bounds.format)->check(CLI::IsMember({"json", "csv"}));
  sb->callback([&] { action = [&] { cmd_bounds(bounds, out); }; });

  int table_id = 0;
  std::string table_out;
  auto* st = app.add_subcommand("table", "Regenerate a table as CSV");
  st->add_option("--id", table_id, "Table number, 1..5")->required();
  st->add_option("--out", table_out, "Output file (default stdout)");
  st->callback([&] { action = [&] { cmd_table(table_id, table_out, out); }; });

  BinormalArgs binormal;
  auto* sn = app.add_subcommand("binormal", "Lambda at fixed false positive rates");
  auto* auc_opt = sn->add_option("--auc", binormal.auc, "Area under the ROC curve in [0.5, 1)");
  auto* dp_opt = sn->add_option("--dprime", binormal.dprime, "Separation d' >= 0");
  auc_opt->excludes(dp_opt);
  dp_opt->excludes(auc_opt);
  sn->add_option("--fpr", binormal.fprs, "False positive rate(s) in (0, 1)")->required()->delimiter(',');
  sn->callback([&] {
    if (!binormal.auc && !binormal.dprime) throw CLI::ValidationError("binormal", "one of --auc or --dprime is required");
    action = [&] { cmd_binormal(binormal, out); };
  });

  CeilingArgs ceiling;
  auto* sc = app.add_subcommand("ceiling", "Exact ceiling of a finite signal space");
  sc->add_option("--space", ceiling.space, "Signal space JSON file")->required();
  sc->add_option("--pi", ceiling.pi, "Base rate in (0, 1)")->required();
  sc->add_option("--coverage", ceiling.coverage, "Minimum issuance q in (0, 1]");
  sc->add_flag("--oracle", ceiling.oracle, "Cross-check against exhaustive enumeration");
  sc->callback([&] { action = [&] { cmd_ceiling(ceiling, out); }; });

  SimulateArgs sim;
  auto* ss = app.add_subcommand("simulate", "Monte Carlo pool simulation");
  ss->add_option("--config", sim.config, "Pool config JSON file")->required();
  ss->add_option("--seed", sim.seed, "RNG seed")->required();
  ss->add_option("--reps", sim.reps, "Number of replications")->required();
  ss->add_option("--workers", sim.workers, "Worker threads (0 = hardware concurrency)");
  ss->add_option("--target-fpr", sim.target_fpr, "Place the threshold rule at this false positive rate");
  ss->add_option("--compare-rho", sim.compare_rho, "LOW,HIGH correlation pair")->delimiter(',')->expected(2);
  ss->add_option("--out", sim.out, "Output CSV file (default stdout)");
  ss->callback([&] { action = [&] { cmd_simulate(sim, out); }; });

  MomentsArgs moments;
  auto* sm = app.add_subcommand("moments", "Moment-matched pairs with diverging tail ratios");
  sm->add_option("--case", moments.which, "Construction, 1 or 2")->required()->check(CLI::IsMember({1, 2}));
  sm->add_option("-a", moments.a, "Case 1 atom shared by both laws");
  sm->add_option("-b", moments.b, "Case 1 extra atom of D2");
  sm->add_option("--eta", moments.eta, "Case 1 weight of the extra atom");
  sm->add_option("--epsilon", moments.epsilon, "Moment tolerance in (0, 1)")->required();
  sm->add_option("--base", moments.base, "Case 2 base law: uniform, beta:A,B or point:C");
  sm->add_option("-M", moments.max_moment, "Number of matched moments");
  sm->add_option("--r-list", moments.r_list, "Comma-separated ratio orders")->delimiter(',');
  sm->callback([&] { action = [&] { cmd_moments(moments, out); }; });

  std::string report_dir = "report";
  auto* sr = app.add_subcommand("report", "Write all tables, figure data and the disclosure file");
  sr->add_option("--out", report_dir, "Output directory");
  sr->callback([&] { action = [&] { cmd_report(report_dir, out); }; });

  std::vector<const char*> argv{"certfeas"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CERTFEAS_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    action();
    return kExitOk;
  } catch (const CheckFailure& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const DegenerateSample& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace certfeas

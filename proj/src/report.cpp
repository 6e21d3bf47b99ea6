#include "certfeas/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "certfeas/binormal.hpp"
#include "certfeas/bounds.hpp"
#include "certfeas/error.hpp"

namespace certfeas::report {

namespace {

constexpr double kFourNines = 0.9999;
constexpr std::array<double, 5> kTable1BaseRates = {0.90, 0.70, 0.50, 0.30, 0.10};
constexpr std::array<double, 4> kTable2Aucs = {0.85, 0.90, 0.95, 0.99};
constexpr std::array<double, 4> kTable3Targets = {0.99, 0.995, 0.999, 0.9999};
constexpr double kBenchmarkCeiling = 100.0;

struct Table4Row {
  double pi;
  double lambda_avail;
};
constexpr std::array<Table4Row, 6> kTable4Rows = {
    {{0.50, 100.0}, {0.50, 50.0}, {0.50, 20.0}, {0.30, 100.0}, {0.30, 50.0}, {0.10, 100.0}}};

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_full(std::optional<double> v) { return v ? full(*v) : std::string(); }

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column named " + name);
}

std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string full(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string grouped(long long v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  const int n = static_cast<int>(digits.size());
  for (int i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out += ',';
    out += digits[static_cast<std::size_t>(i)];
  }
  return v < 0 ? "-" + out : out;
}

double round_to_step(double v, double step) { return std::round(v / step) * step; }

std::string display_step(double v, double step) { return grouped(std::llround(round_to_step(v, step))); }

std::string display_decimals(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string display_significant(double v, int digits) {
  if (v == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
  const int decimals = digits - 1 - exponent;
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::round(v * scale) / scale;
  if (decimals <= 0) return std::to_string(std::llround(rounded));
  return display_decimals(rounded, decimals);
}

double lambda_req_display_value(double lambda_req) { return round_to_step(lambda_req, 100.0); }

double table3_display_value(double lambda_req) {
  return lambda_req >= 5000.0 ? round_to_step(lambda_req, 100.0) : std::round(lambda_req);
}

double psi_display_value(double lambda_req, double lambda_avail) {
  return std::round(lambda_req_display_value(lambda_req) / lambda_avail);
}

const std::vector<Scenario>& bundled_scenarios() {
  static const std::vector<Scenario> scenarios = {
      Scenario{
          .name = "Corporate AAA",
          .tau = kFourNines,
          .pi = {0.99, 0.99, 0.99},
          .lambda_avail = {300.0, 300.0, 300.0},
          .coverage_q = std::nullopt,
          .ppv_obs = std::nullopt,
          .certified_event = "no default",
          .horizon = "5 years",
          .reference_class = "corporate issuers presented for AAA",
          .notes = "plausibility benchmark; ceiling of 300 or more",
          .pi_text = "~0.99",
          .lambda_req_text = "~100",
          .lambda_avail_text = "~300+",
          .psi_text = "~0.3",
      },
      Scenario{
          .name = "Pre-Crisis CDOs",
          .tau = kFourNines,
          .pi = {0.30, 0.50, 0.50},
          .lambda_avail = {50.0, 100.0, 100.0},
          .coverage_q = std::nullopt,
          .ppv_obs = 0.10,
          .certified_event = "no downgrade to speculative grade",
          .horizon = "5 years",
          .reference_class = "senior CDO tranches presented for AAA, 2005-2007",
          .notes = "benchmark ceiling from the AUC 0.90 binormal model at FPR 1e-3; observed PPV about 0.10",
          .pi_text = "~0.30–0.50",
          .lambda_req_text = "~10,000–23,000",
          .lambda_avail_text = "~50–100",
          .psi_text = "~100–470",
      },
      Scenario{
          .name = "Contemporary CLOs",
          .tau = kFourNines,
          .pi = {0.40, 0.40, 0.40},
          .lambda_avail = {50.0, 100.0, 80.0},
          .coverage_q = std::nullopt,
          .ppv_obs = std::nullopt,
          .certified_event = "principal loss (illustrative)",
          .horizon = "deal life",
          .reference_class = "broadly syndicated loan CLO AAA tranches",
          .notes = "illustrative calibration, not fitted to deal data",
          .pi_text = "~0.40",
          .lambda_req_text = "~15,000",
          .lambda_avail_text = "~50–100",
          .psi_text = "~150–300",
      },
  };
  return scenarios;
}

Table table1() {
  Table t{{"pi", "odds_ratio", "odds_ratio_display", "lambda_req", "lambda_req_display"}, {}};
  const ReliabilityTarget tau(kFourNines);
  for (double p : kTable1BaseRates) {
    const double odds = (1.0 - p) / p;
    const double req = lambda_required(tau, BaseRate(p));
    t.rows.push_back({display_decimals(p, 2), full(odds), display_decimals(odds, 2), full(req),
                      grouped(std::llround(lambda_req_display_value(req)))});
  }
  return t;
}

Table table2() {
  Table t{{"auc", "dprime", "dprime_display", "lambda_fpr_1e-3", "lambda_fpr_1e-3_display", "lambda_fpr_1e-4",
           "lambda_fpr_1e-4_display"},
          {}};
  for (double auc : kTable2Aucs) {
    const auto model = BinormalModel::from_auc(auc);
    const double l3 = lambda_at_fpr(model, 1e-3).lambda;
    const double l4 = lambda_at_fpr(model, 1e-4).lambda;
    t.rows.push_back({display_decimals(auc, 2), full(model.dprime()), display_decimals(model.dprime(), 2), full(l3),
                      grouped(std::llround(l3)), full(l4), grouped(std::llround(l4))});
  }
  return t;
}

Table table3() {
  Table t{{"tau", "min_pi", "min_pi_display", "lambda_req_pi_0.50", "lambda_req_pi_0.50_display",
           "lambda_req_pi_0.30", "lambda_req_pi_0.30_display"},
          {}};
  for (double tv : kTable3Targets) {
    const ReliabilityTarget tau(tv);
    const double min_pi = rescue_min_base_rate(tau, kBenchmarkCeiling).value();
    const double r50 = lambda_required(tau, BaseRate(0.50));
    const double r30 = lambda_required(tau, BaseRate(0.30));
    t.rows.push_back({full(tv), full(min_pi), display_decimals(min_pi, 2), full(r50),
                      grouped(std::llround(table3_display_value(r50))), full(r30),
                      grouped(std::llround(table3_display_value(r30)))});
  }
  return t;
}

Table table4() {
  Table t{{"pi", "lambda_req", "lambda_req_display", "lambda_avail", "psi", "psi_display"}, {}};
  const ReliabilityTarget tau(kFourNines);
  for (const auto& row : kTable4Rows) {
    const BaseRate pi(row.pi);
    const double req = lambda_required(tau, pi);
    const double psi = tension_ratio(tau, pi, Discrimination::finite(row.lambda_avail));
    t.rows.push_back({display_decimals(row.pi, 2), full(req), grouped(std::llround(lambda_req_display_value(req))),
                      full(row.lambda_avail), full(psi),
                      grouped(std::llround(psi_display_value(req, row.lambda_avail)))});
  }
  return t;
}

Table table5() {
  Table t{{"quantity", "asset_class", "display", "low", "high", "point"}, {}};
  for (const auto& s : bundled_scenarios()) {
    const ReliabilityTarget tau(s.tau);
    const double req_low = lambda_required(tau, BaseRate(s.pi.high));
    const double req_high = lambda_required(tau, BaseRate(s.pi.low));
    const double req_point = lambda_required(tau, BaseRate(s.pi.point));
    t.rows.push_back({"base_rate", s.name, s.pi_text, full(s.pi.low), full(s.pi.high), full(s.pi.point)});
    t.rows.push_back({"lambda_req", s.name, s.lambda_req_text, full(req_low), full(req_high), full(req_point)});
    t.rows.push_back({"lambda_avail", s.name, s.lambda_avail_text, full(s.lambda_avail.low),
                      full(s.lambda_avail.high), full(s.lambda_avail.point)});
    t.rows.push_back({"tension_ratio", s.name, s.psi_text, full(req_low / s.lambda_avail.high),
                      full(req_high / s.lambda_avail.low), full(req_point / s.lambda_avail.point)});
  }
  return t;
}

Table figure1() {
  Table t{{"asset_class", "lambda_req", "lambda_req_display", "lambda_avail", "lambda_ach", "lambda_ach_display"}, {}};
  for (const auto& s : bundled_scenarios()) {
    const BaseRate pi(s.pi.point);
    const double req = lambda_required(ReliabilityTarget(s.tau), pi);
    std::optional<double> ach;
    if (s.ppv_obs) ach = achieved_discrimination(1.0 - *s.ppv_obs, pi);
    t.rows.push_back({s.name, full(req), display_significant(req, 3), full(s.lambda_avail.point), opt_full(ach),
                      ach ? display_significant(*ach, 2) : std::string()});
  }
  return t;
}

Table table(int id) {
  switch (id) {
    case 1: return table1();
    case 2: return table2();
    case 3: return table3();
    case 4: return table4();
    case 5: return table5();
    default: throw DomainError("id", "table id must be 1..5, got " + std::to_string(id));
  }
}

nlohmann::json disclosure(const std::string& tool_version) {
  using nlohmann::json;
  json scenarios = json::array();
  for (const auto& s : bundled_scenarios()) {
    const ReliabilityTarget tau(s.tau);
    const BaseRate pi(s.pi.point);
    const auto ceiling = Discrimination::finite(s.lambda_avail.point);
    const FeasibilityVerdict v = assess({tau, pi, ceiling, s.coverage_q});
    json j = {
        {"name", s.name},
        {"target_tau", s.tau},
        {"certified_event", s.certified_event},
        {"horizon", s.horizon},
        {"reference_class", s.reference_class},
        {"base_rate", {{"point", s.pi.point}, {"low", s.pi.low}, {"high", s.pi.high}}},
        {"lambda_avail",
         {{"value", s.lambda_avail.point},
          {"low", s.lambda_avail.low},
          {"high", s.lambda_avail.high},
          {"kind", s.coverage_q ? "coverage-constrained" : "unconstrained"},
          {"coverage_q", s.coverage_q ? json(*s.coverage_q) : json(nullptr)}}},
        {"lambda_req", v.lambda_req},
        {"tension_ratio", v.tension_psi},
        {"tension_ratio_range",
         {lambda_required(tau, BaseRate(s.pi.high)) / s.lambda_avail.high,
          lambda_required(tau, BaseRate(s.pi.low)) / s.lambda_avail.low}},
        {"max_ppv", v.max_ppv.value()},
        {"feasible", v.feasible},
        {"rescue_min_base_rate", rescue_min_base_rate(tau, s.lambda_avail.point).value()},
        {"notes", s.notes},
    };
    if (s.ppv_obs) {
      j["ppv_obs"] = *s.ppv_obs;
      j["lambda_ach"] = achieved_discrimination(1.0 - *s.ppv_obs, pi);
      j["prior_free_deficit"] = prior_free_deficit(*s.ppv_obs, tau);
    }
    scenarios.push_back(std::move(j));
  }
  return json{
      {"metadata",
       {{"tool", "certfeas"},
        {"version", tool_version},
        {"seeds", json::array()},
        {"rounding",
         {{"table1", "lambda_req to nearest 100"},
          {"table2", "dprime to 2 decimals; lambda to nearest integer"},
          {"table3", "min_pi to 2 decimals; lambda_req to nearest 100 at or above 5000, else nearest integer"},
          {"table4", "lambda_req to nearest 100; psi_display = round(lambda_req_display / lambda_avail)"},
          {"table5", "display cells verbatim from bundled scenarios; low/high/point computed"},
          {"figure1", "lambda_req to 3 significant figures; lambda_ach to 2"}}}}},
      {"scenarios", std::move(scenarios)},
  };
}

std::vector<std::filesystem::path> write_bundle(const std::filesystem::path& dir,
                                                const std::string& tool_version) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << body;
    if (!f) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  };
  for (int id = 1; id <= 5; ++id) write("table" + std::to_string(id) + ".csv", to_csv(table(id)));
  write("figure1.csv", to_csv(figure1()));
  write("disclosure.json", disclosure(tool_version).dump(2) + "\n");
  return written;
}

}  // namespace certfeas::report

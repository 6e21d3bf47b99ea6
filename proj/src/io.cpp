#include "certfeas/io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "certfeas/error.hpp"

namespace certfeas::io {

namespace {

using nlohmann::json;

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(key, "missing required field");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) throw DomainError(key, "must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_integer()) throw DomainError(key, "must be an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_array()) throw DomainError(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw DomainError(key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

json interval_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

}  // namespace

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("file", "cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw DomainError("file", path.string() + ": " + e.what());
  }
}

DiscreteSignalSpace space_from_json(const nlohmann::json& j) {
  const json& sym = member(j, "symbols");
  if (!sym.is_array()) throw DomainError("symbols", "must be an array of strings");
  std::vector<std::string> symbols;
  for (const auto& e : sym) {
    if (!e.is_string()) throw DomainError("symbols", "must be an array of strings");
    symbols.push_back(e.get<std::string>());
  }
  return DiscreteSignalSpace(std::move(symbols), numbers(j, "p0"), numbers(j, "p1"));
}

PoolConfig pool_config_from_json(const nlohmann::json& j) {
  PoolConfig cfg;
  const json& regimes = member(j, "regimes");
  if (!regimes.is_array() || regimes.empty()) throw DomainError("regimes", "must be a non-empty array");
  for (const auto& r : regimes) {
    PoolSpec pool{integer(r, "n_loans"), number(r, "pd"), number(r, "rho"), number(r, "lgd")};
    const double weight = r.contains("weight") ? number(r, "weight") : 1.0;
    cfg.sim.regimes.regimes.push_back(Regime{pool, weight});
  }
  const json& tranche = member(j, "tranche");
  cfg.sim.tranche = TrancheSpec{number(tranche, "attachment"), number(tranche, "detachment")};
  cfg.sim.signal_noise_sd = number(j, "signal_noise_sd");

  if (j.contains("signal_model")) {
    const json& m = j.at("signal_model");
    if (m == "survival_score") {
      cfg.sim.signal_model = SignalModel::survival_score;
    } else if (m == "event_indicator") {
      cfg.sim.signal_model = SignalModel::event_indicator;
    } else {
      throw DomainError("signal_model", "must be \"survival_score\" or \"event_indicator\"");
    }
  }
  if (j.contains("target_fpr")) cfg.target_fpr = number(j, "target_fpr");
  if (j.contains("compare_rho")) {
    const auto rho = numbers(j, "compare_rho");
    if (rho.size() != 2) throw DomainError("compare_rho", "must hold exactly two values");
    cfg.compare_rho = std::pair{rho[0], rho[1]};
  }
  if (j.contains("ceiling_experiment")) {
    const json& c = j.at("ceiling_experiment");
    cfg.ceiling_experiment =
        CeilingExperimentSpec{number(c, "deep_attachment"), number(c, "deep_detachment"), integer(c, "n_bins")};
  }
  cfg.sim.validate();
  return cfg;
}

nlohmann::json to_json(const MomentReport& report) {
  json ratios = json::array();
  for (const auto& s : report.ratios) {
    ratios.push_back({
        {"r", s.r},
        {"log_ratio", s.log_ratio},
        {"ratio", std::exp(s.log_ratio)},
        {"log_lower_bound", interval_json(s.log_lower_bound)},
        {"lower_bound", s.log_lower_bound ? json(std::exp(*s.log_lower_bound)) : json(nullptr)},
        {"meets_bound", s.meets_bound},
    });
  }
  return json{
      {"max_moment", report.max_moment},
      {"epsilon", report.epsilon},
      {"target_moments", report.target_moments},
      {"d1_moments", report.d1_moments},
      {"d2_moments", report.d2_moments},
      {"max_deviation", report.max_deviation},
      {"deviation_ok", report.deviation_ok},
      {"ratios", std::move(ratios)},
      {"bounds_ok", report.bounds_ok},
      {"diverging", report.diverging},
      {"valid", report.valid()},
  };
}

}  // namespace certfeas::io

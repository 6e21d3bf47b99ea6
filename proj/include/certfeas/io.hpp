#pragma once
// JSON readers for signal spaces and pool configs, and JSON writers for
// library results. Schema errors surface as DomainError naming the field.

#include <filesystem>
#include <optional>
#include <utility>

#include <json.hpp>

#include "certfeas/discrete_lab.hpp"
#include "certfeas/moment_lab.hpp"
#include "certfeas/pool_sim.hpp"

namespace certfeas::io {

// Parses a file; DomainError("file") on I/O or syntax errors.
nlohmann::json read_json(const std::filesystem::path& path);

// {"symbols": [...], "p0": [...], "p1": [...]}
DiscreteSignalSpace space_from_json(const nlohmann::json& j);

struct CeilingExperimentSpec {
  double deep_attachment;
  double deep_detachment;
  int n_bins;
};

// Pool config plus the optional experiment blocks understood by the
// simulate command.
struct PoolConfig {
  SimConfig sim;
  std::optional<double> target_fpr;
  std::optional<std::pair<double, double>> compare_rho;
  std::optional<CeilingExperimentSpec> ceiling_experiment;
};

// {"regimes": [{"n_loans", "pd", "rho", "lgd", "weight"}...],
//  "tranche": {"attachment", "detachment"}, "signal_noise_sd",
//  optional "signal_model": "survival_score" | "event_indicator",
//  optional "target_fpr", optional "compare_rho": [low, high],
//  optional "ceiling_experiment": {"deep_attachment", "deep_detachment", "n_bins"}}
PoolConfig pool_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MomentReport& report);

}  // namespace certfeas::io

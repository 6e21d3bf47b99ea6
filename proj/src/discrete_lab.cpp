#include "certfeas/discrete_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>

#include "certfeas/error.hpp"

namespace certfeas {

namespace {

void check_pmf(const std::vector<double>& p, const char* name) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(name, "entries must be finite and non-negative");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > kPmfTolerance) {
    throw DomainError(name, "must sum to 1 within 1e-12, sums to " + std::to_string(total));
  }
}

bool same_ratio(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

DiscreteSignalSpace::DiscreteSignalSpace(std::vector<std::string> symbols, std::vector<double> p0,
                                         std::vector<double> p1)
    : symbols_(std::move(symbols)), p0_(std::move(p0)), p1_(std::move(p1)) {
  if (symbols_.empty()) throw DomainError("symbols", "space needs at least one symbol");
  if (p0_.size() != symbols_.size() || p1_.size() != symbols_.size()) {
    throw DomainError("space", "symbols, p0 and p1 must have equal length");
  }
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second) throw DomainError("symbols", "duplicate symbol '" + s + "'");
  }
  check_pmf(p0_, "p0");
  check_pmf(p1_, "p1");
  for (std::size_t i = 0; i < size(); ++i) {
    if (p0_[i] == 0.0 && p1_[i] > 0.0) throw OverlapViolation(symbols_[i]);
  }
}

std::size_t DiscreteSignalSpace::index_of(const std::string& symbol) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end()) throw DomainError("symbol", "unknown symbol '" + symbol + "'");
  return static_cast<std::size_t>(it - symbols_.begin());
}

std::vector<SymbolRatio> likelihood_ratios(const DiscreteSignalSpace& space) {
  std::vector<SymbolRatio> out;
  out.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.p0()[i] > 0.0) {
      out.push_back({i, space.symbols()[i], space.p1()[i] / space.p0()[i]});
    }
  }
  return out;
}

double esssup_lambda(const DiscreteSignalSpace& space) {
  double best = 0.0;
  for (const auto& r : likelihood_ratios(space)) best = std::max(best, r.ratio);
  return best;
}

RuleEvaluation evaluate_rule(const DiscreteSignalSpace& space, const RandomizedRule& rule,
                             BaseRate pi) {
  if (rule.accept_prob.size() != space.size()) {
    throw DomainError("rule", "acceptance vector length does not match the space");
  }
  double s = 0.0;
  double f = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double a = rule.accept_prob[i];
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("rule", "acceptance probabilities must lie in [0, 1]");
    s += a * space.p1()[i];
    f += a * space.p0()[i];
  }
  const double p = pi.value();
  const double issuance = p * s + (1.0 - p) * f;
  if (!(issuance > 0.0)) throw InadmissibleRule();

  RuleEvaluation ev{.sensitivity = s,
                    .fpr = f,
                    .lambda = std::nullopt,
                    .ppv = p * s / issuance,
                    .issuance = issuance};
  if (f > 0.0) ev.lambda = s / f;
  return ev;
}

RandomizedRule near_optimal_rule(const DiscreteSignalSpace& space, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon", "must be positive");
  const double top = esssup_lambda(space);
  RandomizedRule rule{std::vector<double>(space.size(), 0.0)};
  for (const auto& r : likelihood_ratios(space)) {
    if (r.ratio >= top - epsilon) rule.accept_prob[r.index] = 1.0;
  }
  return rule;
}

Probability max_ppv_exact(const DiscreteSignalSpace& space, BaseRate pi) {
  return max_ppv(pi, Discrimination::finite(esssup_lambda(space)));
}

CoverageCeiling coverage_constrained_ceiling(const DiscreteSignalSpace& space, BaseRate pi,
                                             double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("coverage", "q must lie in (0, 1], got " + std::to_string(q));
  }
  auto ratios = likelihood_ratios(space);
  std::stable_sort(ratios.begin(), ratios.end(),
                   [](const SymbolRatio& a, const SymbolRatio& b) { return a.ratio > b.ratio; });

  // Group equal likelihood ratios; any split inside a group gives the same
  // Lambda, so the group is filled as one unit.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (k == 0 || !same_ratio(ratios[k].ratio, ratios[k - 1].ratio)) groups.emplace_back();
    groups.back().push_back(ratios[k].index);
  }

  const double p = pi.value();
  RandomizedRule witness{std::vector<double>(space.size(), 0.0)};
  double covered = 0.0;
  for (const auto& g : groups) {
    double w = 0.0;
    for (std::size_t i : g) w += p * space.p1()[i] + (1.0 - p) * space.p0()[i];
    if (covered + w >= q) {
      const double frac = std::clamp((q - covered) / w, 0.0, 1.0);
      for (std::size_t i : g) witness.accept_prob[i] = frac;
      break;
    }
    for (std::size_t i : g) witness.accept_prob[i] = 1.0;
    covered += w;
  }

  const RuleEvaluation ev = evaluate_rule(space, witness, pi);
  return CoverageCeiling{.lambda = *ev.lambda, .witness = std::move(witness), .issuance = ev.issuance};
}

DiscreteSignalSpace pushforward(const DiscreteSignalSpace& space,
                                const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> out_symbols;
  std::vector<double> q0;
  std::vector<double> q1;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto it = mapping.find(space.symbols()[i]);
    if (it == mapping.end()) {
      throw DomainError("mapping", "symbol '" + space.symbols()[i] + "' is not mapped");
    }
    auto [pos, inserted] = slot.emplace(it->second, out_symbols.size());
    if (inserted) {
      out_symbols.push_back(it->second);
      q0.push_back(0.0);
      q1.push_back(0.0);
    }
    q0[pos->second] += space.p0()[i];
    q1[pos->second] += space.p1()[i];
  }
  return DiscreteSignalSpace(std::move(out_symbols), std::move(q0), std::move(q1));
}

namespace {

OracleResult enumerate_subsets(const DiscreteSignalSpace& space, double pi) {
  const std::size_t n = space.size();
  OracleResult best{0.0, 0.0};
  bool any = false;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0.0;
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) {
        s += space.p1()[i];
        f += space.p0()[i];
      }
    }
    if (!(f > 0.0)) continue;
    any = true;
    best.max_lambda = std::max(best.max_lambda, s / f);
    best.max_ppv = std::max(best.max_ppv, pi * s / (pi * s + (1.0 - pi) * f));
  }
  if (!any) throw DegenerateSample("no admissible rule on this space");
  return best;
}

// Depth-first walk of the alpha grid with running sums; the last symbol's
// levels are scanned in a flat loop.
struct GridSearch {
  const DiscreteSignalSpace& space;
  double pi;
  double q;
  int levels;
  double best_lambda = -1.0;
  double best_s = 0.0;
  double best_f = 0.0;

  void run(std::size_t depth, double s, double f) {
    const std::size_t last = space.size() - 1;
    const double p1 = space.p1()[depth];
    const double p0 = space.p0()[depth];
    if (depth == last) {
      const double floor_q = q * (1.0 - 1e-12);
      for (int k = 0; k < levels; ++k) {
        const double a = static_cast<double>(k) / (levels - 1);
        const double ss = s + a * p1;
        const double ff = f + a * p0;
        if (!(ff > 0.0)) continue;
        if (pi * ss + (1.0 - pi) * ff < floor_q) continue;
        if (ss > best_lambda * ff) {
          best_lambda = ss / ff;
          best_s = ss;
          best_f = ff;
        }
      }
      return;
    }
    for (int k = 0; k < levels; ++k) {
      const double a = static_cast<double>(k) / (levels - 1);
      run(depth + 1, s + a * p1, f + a * p0);
    }
  }
};

}  // namespace

OracleResult brute_force_oracle(const DiscreteSignalSpace& space, BaseRate pi,
                                std::optional<double> q) {
  if (!q) {
    if (space.size() > kOracleMaxSymbols) {
      throw DomainError("space", "exhaustive oracle supports at most 12 symbols");
    }
    return enumerate_subsets(space, pi.value());
  }
  if (space.size() > kOracleMaxSymbolsCoverage) {
    throw DomainError("space", "alpha-grid oracle supports at most 6 symbols");
  }
  if (!(*q > 0.0 && *q <= 1.0)) throw DomainError("coverage", "q must lie in (0, 1]");
  const int levels = static_cast<int>(std::lround(1.0 / kOracleGridStep)) + 1;
  GridSearch search{space, pi.value(), *q, levels};
  search.run(0, 0.0, 0.0);
  if (search.best_lambda < 0.0) throw DegenerateSample("no grid rule reaches the coverage level");
  const double p = pi.value();
  return OracleResult{
      .max_lambda = search.best_lambda,
      .max_ppv = p * search.best_s / (p * search.best_s + (1.0 - p) * search.best_f)};
}

CoverageGridCheck check_coverage_against_grid(const DiscreteSignalSpace& space, BaseRate pi,
                                              double q) {
  const CoverageCeiling greedy = coverage_constrained_ceiling(space, pi, q);
  const OracleResult grid = brute_force_oracle(space, pi, q);

  RandomizedRule rounded = greedy.witness;
  for (double& a : rounded.accept_prob) {
    a = std::min(1.0, std::ceil(a / kOracleGridStep - 1e-9) * kOracleGridStep);
  }
  const double floor_lambda = *evaluate_rule(space, rounded, pi).lambda;
  const double slack = 1e-12 * std::max(1.0, greedy.lambda);
  return CoverageGridCheck{
      .greedy_lambda = greedy.lambda,
      .grid_lambda = grid.max_lambda,
      .resolution_floor = floor_lambda,
      .agrees = floor_lambda - slack <= grid.max_lambda && grid.max_lambda <= greedy.lambda + slack};
}

}  // namespace certfeas

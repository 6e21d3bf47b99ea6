#pragma once
// Finite-alphabet signal spaces where the discrimination ceiling is an exact
// maximum, together with exhaustive oracles that check the ceiling, the
// coverage-constrained ceiling and the pushforward bound.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "certfeas/bounds.hpp"

namespace certfeas {

// Conditional pmfs of a finite signal given E=0 (p0) and E=1 (p1), aligned by
// index with `symbols`.
class DiscreteSignalSpace {
 public:
  // Validates shape, non-negativity, normalization (1e-12) and overlap.
  DiscreteSignalSpace(std::vector<std::string> symbols, std::vector<double> p0,
                      std::vector<double> p1);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<double>& p0() const noexcept { return p0_; }
  const std::vector<double>& p1() const noexcept { return p1_; }

  // Index of a symbol; throws DomainError if absent.
  std::size_t index_of(const std::string& symbol) const;

 private:
  std::vector<std::string> symbols_;
  std::vector<double> p0_;
  std::vector<double> p1_;
};

inline constexpr double kPmfTolerance = 1e-12;

// alpha(x) in [0, 1] per symbol.
struct RandomizedRule {
  std::vector<double> accept_prob;
};

struct RuleEvaluation {
  double sensitivity;
  double fpr;
  std::optional<double> lambda;  // defined when fpr > 0
  double ppv;
  double issuance;  // pi*S + (1-pi)*F
};

struct SymbolRatio {
  std::size_t index;
  std::string symbol;
  double ratio;
};

// L(x) = p1(x)/p0(x) on the p0-support; symbols with p0 = p1 = 0 are skipped.
std::vector<SymbolRatio> likelihood_ratios(const DiscreteSignalSpace& space);

// max L over the p0-support: the discrimination ceiling of the space.
double esssup_lambda(const DiscreteSignalSpace& space);

// Throws InadmissibleRule when the rule never accepts.
RuleEvaluation evaluate_rule(const DiscreteSignalSpace& space, const RandomizedRule& rule,
                             BaseRate pi);

// Accepts exactly the support symbols with L(x) >= esssup - epsilon.
RandomizedRule near_optimal_rule(const DiscreteSignalSpace& space, double epsilon);

Probability max_ppv_exact(const DiscreteSignalSpace& space, BaseRate pi);

struct CoverageCeiling {
  double lambda;
  RandomizedRule witness;
  double issuance;
};

// sup { Lambda(alpha) : I_pi(alpha) >= q }, q in (0, 1]. Symbols are visited in
// descending L (equal L merged into one group) and accepted until the
// issuance reaches q; the marginal group is accepted fractionally.
CoverageCeiling coverage_constrained_ceiling(const DiscreteSignalSpace& space, BaseRate pi,
                                             double q);

// Relabels symbols through `mapping` (every symbol must be mapped) and sums
// the pmfs over each preimage. Output symbols appear in order of first use.
DiscreteSignalSpace pushforward(const DiscreteSignalSpace& space,
                                const std::map<std::string, std::string>& mapping);

struct OracleResult {
  double max_lambda;
  double max_ppv;
};

inline constexpr std::size_t kOracleMaxSymbols = 12;
inline constexpr std::size_t kOracleMaxSymbolsCoverage = 6;
inline constexpr double kOracleGridStep = 0.05;

// Exhaustive maximum over deterministic rules (all 2^n accept sets), or, when
// q is given, over the alpha-grid {0, 0.05, ..., 1}^n restricted to
// I_pi >= q. Throws DomainError when the space is too large to enumerate.
OracleResult brute_force_oracle(const DiscreteSignalSpace& space, BaseRate pi,
                                std::optional<double> q = std::nullopt);

struct CoverageGridCheck {
  double greedy_lambda;
  double grid_lambda;
  // Lambda of the greedy witness with its fractional entry rounded up to the
  // next grid level: a grid rule that still meets the coverage level.
  double resolution_floor;
  bool agrees;  // resolution_floor <= grid_lambda <= greedy_lambda (1e-12 slack)
};

CoverageGridCheck check_coverage_against_grid(const DiscreteSignalSpace& space, BaseRate pi,
                                              double q);

}  // namespace certfeas

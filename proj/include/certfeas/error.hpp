#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace certfeas {

// Raised when an input falls outside the domain an operation is defined on.
// `field()` names the offending parameter so front ends can report it.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string field, const std::string& what)
      : std::domain_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// P1 must be absolutely continuous w.r.t. P0: a symbol with p0 = 0 and p1 > 0
// has no finite likelihood ratio.
class OverlapViolation : public DomainError {
 public:
  explicit OverlapViolation(std::string symbol)
      : DomainError("space", "overlap condition violated at symbol '" + symbol +
                                 "' (p0 = 0 while p1 > 0)"),
        symbol_(std::move(symbol)) {}

  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

// A decision rule that never accepts anything.
class InadmissibleRule : public DomainError {
 public:
  InadmissibleRule()
      : DomainError("rule", "unconditional acceptance probability is zero") {}
};

// One or more named inequalities of a construction failed. Every violated
// inequality is listed, not just the first.
class PreconditionViolation : public DomainError {
 public:
  explicit PreconditionViolation(std::vector<std::string> violations)
      : DomainError("preconditions", join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

// A sample that cannot support the requested estimate (no positives, an empty
// bin, ...).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace certfeas

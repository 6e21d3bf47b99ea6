#include "certfeas/moment_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "certfeas/error.hpp"

namespace certfeas {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_pow(double x, int m) {
  if (m == 0) return 0.0;
  return x > 0.0 ? m * std::log(x) : kNegInf;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

MomentOracle MomentOracle::beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("base", "Beta parameters must be finite and positive");
  }
  return MomentOracle(Kind::beta, a, b);
}

MomentOracle MomentOracle::point_mass(double location) {
  if (!(location >= 0.0 && location <= 1.0)) throw DomainError("base", "point mass must sit in [0, 1]");
  return MomentOracle(Kind::point, location, 0.0);
}

double MomentOracle::log_moment(int m) const {
  if (m < 0) throw DomainError("m", "moment order must be non-negative");
  if (kind_ == Kind::point) return log_pow(p_, m);
  // E[U^m] = prod_{k<m} (a + k) / (a + b + k)
  return std::lgamma(p_ + m) - std::lgamma(p_) + std::lgamma(p_ + q_) - std::lgamma(p_ + q_ + m);
}

double MomentOracle::moment(int m) const {
  if (m < 0) throw DomainError("m", "moment order must be non-negative");
  if (kind_ == Kind::point) return m == 0 ? 1.0 : std::pow(p_, m);
  double v = 1.0;
  for (int k = 0; k < m; ++k) v *= (p_ + k) / (p_ + q_ + k);
  return v;
}

std::string MomentOracle::name() const {
  if (kind_ == Kind::point) return "point_mass(" + fmt(p_) + ")";
  if (p_ == 1.0 && q_ == 1.0) return "uniform";
  return "beta(" + fmt(p_) + "," + fmt(q_) + ")";
}

void PointMixture::validate() const {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.location >= 0.0 && a.location <= 1.0)) throw DomainError("location", "atoms must lie in [0, 1]");
    if (!(a.weight > 0.0 && a.weight <= 1.0)) throw DomainError("weight", "atom weights must lie in (0, 1]");
    total += a.weight;
  }
  if (scaled) {
    if (!(scaled->scale > 0.0 && scaled->scale <= 1.0)) throw DomainError("scale", "must lie in (0, 1]");
    if (!(scaled->weight > 0.0 && scaled->weight <= 1.0)) throw DomainError("weight", "base weight must lie in (0, 1]");
    total += scaled->weight;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("weight", "mixture weights must sum to 1");
}

double moments(const PointMixture& dist, int m) {
  if (m < 1) throw DomainError("m", "moment order must be at least 1");
  double v = 0.0;
  for (const auto& a : dist.atoms) v += a.weight * std::pow(a.location, m);
  if (dist.scaled) v += dist.scaled->weight * std::pow(dist.scaled->scale, m) * dist.scaled->base.moment(m);
  return v;
}

double log_moment(const PointMixture& dist, int m) {
  if (m < 1) throw DomainError("m", "moment order must be at least 1");
  double acc = kNegInf;
  for (const auto& a : dist.atoms) acc = log_add(acc, std::log(a.weight) + log_pow(a.location, m));
  if (dist.scaled) {
    acc = log_add(acc, std::log(dist.scaled->weight) + log_pow(dist.scaled->scale, m) +
                           dist.scaled->base.log_moment(m));
  }
  return acc;
}

std::optional<double> MomentPair::log_ratio_lower_bound(int r) const {
  switch (construction) {
    case Construction::case1:
      // exact: (1 - eta) + eta (b/a)^r
      return log_add(std::log1p(-eta), std::log(eta) + r * std::log(b / a));
    case Construction::case2:
      return std::log(eta) + r * (std::log1p(-delta) - std::log1p(-2.0 * delta));
    case Construction::custom:
      return std::nullopt;
  }
  return std::nullopt;
}

MomentPair construct_case1(double a, double b, double eta, double epsilon) {
  std::vector<std::string> bad;
  if (!(epsilon > 0.0 && epsilon < 1.0)) bad.emplace_back("0 < ε < 1 violated");
  if (!(a > 0.0)) bad.emplace_back("0 < a violated");
  if (!(a < b)) bad.emplace_back("a < b violated");
  if (!(b < 1.0)) bad.emplace_back("b < 1 violated");
  if (!(a <= epsilon / 2.0)) bad.emplace_back("a ≤ ε/2 violated");
  if (!(eta > 0.0)) bad.emplace_back("0 < η violated");
  if (!(eta < epsilon / 2.0)) bad.emplace_back("η < ε/2 violated");
  if (!bad.empty()) throw PreconditionViolation(std::move(bad));

  MomentPair pair{
      .d1 = PointMixture{{Atom{a, 1.0}}, std::nullopt},
      .d2 = PointMixture{{Atom{a, 1.0 - eta}, Atom{b, eta}}, std::nullopt},
      .target = MomentOracle::point_mass(0.0),
      .construction = Construction::case1,
      .a = a,
      .b = b,
      .eta = eta,
  };
  return pair;
}

MomentPair construct_case2(const MomentOracle& base, int max_moment, double epsilon) {
  std::vector<std::string> bad;
  if (!(epsilon > 0.0 && epsilon < 1.0)) bad.emplace_back("0 < ε < 1 violated");
  if (max_moment < 1) bad.emplace_back("M ≥ 1 violated");
  const double mu1 = base.moment(1);
  if (!(mu1 > 0.0)) bad.emplace_back("μ1 > 0 violated (μ1 = 0 belongs to case 1)");
  if (!(mu1 < 1.0)) bad.emplace_back("μ1 < 1 violated");
  if (!bad.empty()) throw PreconditionViolation(std::move(bad));

  const double delta = epsilon / (4.0 * max_moment);
  const double eta = epsilon / 2.0;
  const ScaledBase scaled_d1{1.0 - 2.0 * delta, 1.0, base};
  const ScaledBase scaled_d2{1.0 - 2.0 * delta, 1.0 - eta, base};
  MomentPair pair{
      .d1 = PointMixture{{}, scaled_d1},
      .d2 = PointMixture{{Atom{1.0 - delta, eta}}, scaled_d2},
      .target = base,
      .construction = Construction::case2,
      .eta = eta,
      .delta = delta,
  };
  return pair;
}

std::vector<int> default_r_list(int max_moment) {
  if (max_moment < 1) throw DomainError("M", "must be at least 1");
  std::vector<int> r{max_moment + 1, 2 * max_moment, 10 * max_moment, 100 * max_moment};
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

MomentReport verify_pair(const MomentPair& pair, int max_moment, double epsilon,
                         const std::vector<int>& r_list) {
  if (max_moment < 1) throw DomainError("M", "must be at least 1");
  pair.d1.validate();
  pair.d2.validate();

  MomentReport rep{};
  rep.max_moment = max_moment;
  rep.epsilon = epsilon;
  rep.max_deviation = 0.0;
  for (int m = 1; m <= max_moment; ++m) {
    const double mu = pair.target.moment(m);
    const double e1 = moments(pair.d1, m);
    const double e2 = moments(pair.d2, m);
    rep.target_moments.push_back(mu);
    rep.d1_moments.push_back(e1);
    rep.d2_moments.push_back(e2);
    rep.max_deviation = std::max({rep.max_deviation, std::fabs(e1 - mu), std::fabs(e2 - mu)});
  }
  rep.deviation_ok = rep.max_deviation <= epsilon;

  rep.bounds_ok = true;
  rep.diverging = !r_list.empty();
  double prev = kNegInf;
  for (int r : r_list) {
    if (r < 1) throw DomainError("r", "ratio orders must be at least 1");
    RatioSample s{r, log_moment(pair.d2, r) - log_moment(pair.d1, r), pair.log_ratio_lower_bound(r), true};
    if (s.log_lower_bound) {
      // The case-1 bound is an identity, so allow for rounding.
      s.meets_bound = s.log_ratio >= *s.log_lower_bound - 1e-10 * std::max(1.0, std::fabs(*s.log_lower_bound));
    }
    rep.bounds_ok = rep.bounds_ok && s.meets_bound;
    if (!(s.log_ratio > prev)) rep.diverging = false;
    prev = s.log_ratio;
    rep.ratios.push_back(s);
  }
  if (rep.ratios.empty() || !(rep.ratios.back().log_ratio > 0.0)) rep.diverging = false;
  return rep;
}

}  // namespace certfeas

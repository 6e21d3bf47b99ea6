#pragma once
// Distribution pairs on [0, 1] that agree on their first M moments to within
// epsilon while E_{D2}[P^r] / E_{D1}[P^r] grows without bound in r.
//
// All moments are exact: point masses contribute w * x^m and the scaled base
// law contributes w * s^m * mu_m(Q) from a closed-form moment oracle. Large
// powers are handled in log space.

#include <optional>
#include <string>
#include <vector>

namespace certfeas {

// Closed-form moments of a law on [0, 1].
class MomentOracle {
 public:
  static MomentOracle uniform() { return MomentOracle(Kind::beta, 1.0, 1.0); }
  static MomentOracle beta(double a, double b);
  static MomentOracle point_mass(double location);

  // E[U^m], m >= 0.
  double moment(int m) const;
  double log_moment(int m) const;
  std::string name() const;

 private:
  enum class Kind { beta, point };
  MomentOracle(Kind kind, double p, double q) : kind_(kind), p_(p), q_(q) {}
  Kind kind_;
  double p_;
  double q_;
};

struct Atom {
  double location;
  double weight;
};

// Law of s * U with U ~ base, carrying mixture weight `weight`.
struct ScaledBase {
  double scale;
  double weight;
  MomentOracle base;
};

struct PointMixture {
  std::vector<Atom> atoms;
  std::optional<ScaledBase> scaled;

  // Weights sum to 1 (1e-12), locations in [0, 1], scale in (0, 1].
  void validate() const;
};

double moments(const PointMixture& dist, int m);
// log E[P^m]; -inf when all mass sits at 0.
double log_moment(const PointMixture& dist, int m);

enum class Construction { case1, case2, custom };

struct MomentPair {
  PointMixture d1;
  PointMixture d2;
  MomentOracle target;  // mu_m of the law being approximated
  Construction construction = Construction::custom;
  double a = 0.0;
  double b = 0.0;
  double eta = 0.0;
  double delta = 0.0;

  // log of the closed-form lower bound on E_{D2}[P^r] / E_{D1}[P^r]; absent for
  // custom pairs.
  std::optional<double> log_ratio_lower_bound(int r) const;
};

// mu_1 = 0: D1 = delta_a, D2 = (1 - eta) delta_a + eta delta_b. Requires
// 0 < a < b < 1, a <= eps/2, 0 < eta < eps/2 and eps in (0, 1).
MomentPair construct_case1(double a, double b, double eta, double epsilon);

// mu_1 in (0, 1): delta = eps/(4M), eta = eps/2, D1 = law of (1 - 2 delta) U
// with U ~ base, D2 = (1 - eta) D1 + eta delta_{1 - delta}.
MomentPair construct_case2(const MomentOracle& base, int max_moment, double epsilon);

struct RatioSample {
  int r;
  double log_ratio;
  std::optional<double> log_lower_bound;
  bool meets_bound;
};

struct MomentReport {
  int max_moment;
  double epsilon;
  std::vector<double> target_moments;
  std::vector<double> d1_moments;
  std::vector<double> d2_moments;
  double max_deviation;
  std::vector<RatioSample> ratios;
  bool deviation_ok;
  bool bounds_ok;
  bool diverging;  // ratios strictly increase across r_list and end above 1

  bool valid() const noexcept { return deviation_ok && bounds_ok; }
};

// Default r values {M+1, 2M, 10M, 100M}, deduplicated and sorted.
std::vector<int> default_r_list(int max_moment);

// Violations are recorded in the report, never thrown.
MomentReport verify_pair(const MomentPair& pair, int max_moment, double epsilon,
                         const std::vector<int>& r_list);

}  // namespace certfeas

#include "certfeas/normal.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "certfeas/error.hpp"

namespace certfeas::normal {

namespace {

enum class ErfKind { erf, erfc, erfcx };

// Cody's CALERF, IEEE double constants.
constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

constexpr double kSqrtPiInv = 5.6418958354775628695e-1;
constexpr double kThresh = 0.46875;
constexpr double kXNeg = -26.628;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;
constexpr double kXHuge = 6.71e7;
constexpr double kXMax = 2.53e307;

// exp(-y*y) computed in two pieces so the rounding of y*y does not leak
// into the tail.
double exp_neg_square(double y) {
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

double calerf(double x, ErfKind kind) {
  const double y = std::fabs(x);
  double result = 0.0;

  if (y <= kThresh) {
    const double ysq = y > kXSmall ? y * y : 0.0;
    double xnum = kA[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + kA[i]) * ysq;
      xden = (xden + kB[i]) * ysq;
    }
    result = x * (xnum + kA[3]) / (xden + kB[3]);
    if (kind != ErfKind::erf) result = 1.0 - result;
    if (kind == ErfKind::erfcx) result *= std::exp(ysq);
    return result;
  }

  if (y <= 4.0) {
    double xnum = kC[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + kC[i]) * y;
      xden = (xden + kD[i]) * y;
    }
    result = (xnum + kC[7]) / (xden + kD[7]);
    if (kind != ErfKind::erfcx) result *= exp_neg_square(y);
  } else {
    bool done = false;
    if (y >= kXBig) {
      if (kind != ErfKind::erfcx || y >= kXMax) {
        done = true;  // result stays 0
      } else if (y >= kXHuge) {
        result = kSqrtPiInv / y;
        done = true;
      }
    }
    if (!done) {
      const double ysq = 1.0 / (y * y);
      double xnum = kP[5] * ysq;
      double xden = ysq;
      for (int i = 0; i < 4; ++i) {
        xnum = (xnum + kP[i]) * ysq;
        xden = (xden + kQ[i]) * ysq;
      }
      result = ysq * (xnum + kP[4]) / (xden + kQ[4]);
      result = (kSqrtPiInv - result) / y;
      if (kind != ErfKind::erfcx) result *= exp_neg_square(y);
    }
  }

  switch (kind) {
    case ErfKind::erf:
      result = (0.5 - result) + 0.5;
      return x < 0.0 ? -result : result;
    case ErfKind::erfc:
      return x < 0.0 ? 2.0 - result : result;
    case ErfKind::erfcx:
      if (x < 0.0) {
        if (x < kXNeg) return std::numeric_limits<double>::max();
        const double ysq = std::trunc(x * 16.0) / 16.0;
        const double del = (x - ysq) * (x + ysq);
        const double e = std::exp(ysq * ysq) * std::exp(del);
        result = (e + e) - result;
      }
      return result;
  }
  return result;
}

// Acklam's rational approximation to the normal quantile.
constexpr std::array<double, 6> kAa = {-3.969683028665376e+01, 2.209460984245205e+02,
                                       -2.759285104469687e+02, 1.383577518672690e+02,
                                       -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kAb = {-5.447609879822406e+01, 1.615858368580409e+02,
                                       -1.556989798598866e+02, 6.680131188771972e+01,
                                       -1.328068155288572e+01};
constexpr std::array<double, 6> kAc = {-7.784894002430293e-03, -3.223964580411365e-01,
                                       -2.400758277161838e+00, -2.549732539343734e+00,
                                       4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kAd = {7.784695709041462e-03, 3.224671290700398e-01,
                                       2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kPLow = 0.02425;

// Lower half only: p in (0, 0.5].
double acklam_lower(double p) {
  if (p < kPLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kAc[0] * q + kAc[1]) * q + kAc[2]) * q + kAc[3]) * q + kAc[4]) * q + kAc[5]) /
           ((((kAd[0] * q + kAd[1]) * q + kAd[2]) * q + kAd[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kAa[0] * r + kAa[1]) * r + kAa[2]) * r + kAa[3]) * r + kAa[4]) * r + kAa[5]) * q /
         (((((kAb[0] * r + kAb[1]) * r + kAb[2]) * r + kAb[3]) * r + kAb[4]) * r + 1.0);
}

// exp(-z^2 / 2) with z split as hi + lo, hi on a 1/16 grid, so the large
// part of the exponent is formed exactly.
double exp_half_square(double z) {
  const double az = std::fabs(z);
  const double hi = std::trunc(az * 16.0) / 16.0;
  const double lo = az - hi;
  return std::exp(-0.5 * hi * hi) * std::exp(-0.5 * lo * (az + hi));
}

}  // namespace

double erfc(double x) { return calerf(x, ErfKind::erfc); }

double erfcx(double x) { return calerf(x, ErfKind::erfcx); }

double pdf(double z) { return exp_half_square(z) / std::sqrt(2.0 * std::numbers::pi); }

double cdf(double z) { return ccdf(-z); }

double ccdf(double z) {
  // Beyond the centre, work from z itself: scaling by 1/sqrt(2) first would
  // cost a relative error of about z^2 ulps through the Gaussian factor.
  if (z > std::numbers::sqrt2 / 2.0) return 0.5 * erfcx(z / std::numbers::sqrt2) * exp_half_square(z);
  return 0.5 * erfc(z / std::numbers::sqrt2);
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("p", "normal quantile requires p in (0, 1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -quantile(1.0 - p);

  double x = acklam_lower(p);
  // Newton step; for p < 0.5 the lower tail is computed without cancellation.
  const double dens = pdf(x);
  if (dens > 0.0) x -= (cdf(x) - p) / dens;
  return x;
}

}  // namespace certfeas::normal

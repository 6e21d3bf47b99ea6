#include <doctest.h>

#include <cmath>
#include <random>

#include "certfeas/error.hpp"
#include "certfeas/normal.hpp"

namespace normal = certfeas::normal;

namespace {

// Reference values computed with mpmath at 40 digits.
struct CdfCase {
  double z;
  double phi;
};
constexpr CdfCase kCdf[] = {
    {-37.5, 4.605353009581954843827969e-308},
    {-20.0, 2.753624118606233695075623e-89},
    {-10.0, 7.619853024160526065973343e-24},
    {-8.25, 7.919726314642477340961374e-17},
    {-5.0, 2.866515718791939116737523e-7},
    {-3.0902, 0.001000108783207071270055569},
    {-1.5, 0.06680720126885806600449404},
    {-0.3, 0.382088577811047362693471},
    {0.3, 0.617911422188952637306529},
    {1.28155, 0.8999997252492584325439905},
    {2.5, 0.9937903346742238648330219},
    {5.0, 0.9999997133484281208060883},
    {8.25, 0.9999999999999999208027369},
};

struct QuantileCase {
  double p;
  double z;
};
constexpr QuantileCase kQuantile[] = {
    {1e-300, -37.04709629936119923722296},
    {1e-20, -9.262340089798407573717357},
    {1e-12, -7.034483825301131929809515},
    {1e-4, -3.719016485455680564393661},
    {1e-3, -3.0902323061678135415404},
    {0.02425, -1.972961051311884850269799},
    {0.1, -1.281551565544600466965103},
    {0.3, -0.5244005127080407840382893},
    {0.75, 0.674489750196081743202227},
    {0.9, 1.281551565544600466965103},
    {0.975, 1.959963984540054235524594},
    {0.999, 3.0902323061678135415404},
};

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("cdf against high-precision references") {
  for (const auto& c : kCdf) {
    CAPTURE(c.z);
    CHECK(rel(normal::cdf(c.z), c.phi) < 1e-14);
    CHECK(rel(normal::ccdf(-c.z), c.phi) < 1e-14);
  }
}

TEST_CASE("quantile against high-precision references") {
  for (const auto& c : kQuantile) {
    CAPTURE(c.p);
    CHECK(rel(normal::quantile(c.p), c.z) < 1e-13);
  }
}

TEST_CASE("quantile is odd about 1/2 and inverts cdf") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> e(-300.0, -0.302);
  for (int k = 0; k < 2000; ++k) {
    const double p = std::pow(10.0, e(rng));
    const double z = normal::quantile(p);
    if (p > 1e-15) CHECK(normal::quantile(1.0 - p) == doctest::Approx(-normal::quantile(1.0 - (1.0 - p))).epsilon(1e-12));
    CHECK(rel(normal::cdf(z), p) < 1e-12);
  }
  CHECK(normal::quantile(0.5) == 0.0);
}

TEST_CASE("cdf is monotone and complements sum to one") {
  double prev = 0.0;
  for (double z = -38.0; z <= 9.0; z += 0.01) {
    const double c = normal::cdf(z);
    CHECK(c >= prev);
    prev = c;
    CHECK(c + normal::ccdf(z) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("erfcx stays finite in the far tail") {
  // erfcx(x) ~ 1 / (x sqrt(pi)) for large x
  for (double x : {30.0, 100.0, 1e4, 1e8}) {
    const double asym = 1.0 / (x * std::sqrt(M_PI)) * (1.0 - 1.0 / (2.0 * x * x));
    CHECK(rel(normal::erfcx(x), asym) < 1e-6);
  }
  CHECK(normal::erfcx(0.0) == doctest::Approx(1.0));
  CHECK(normal::erfc(0.0) == doctest::Approx(1.0));
  CHECK(normal::erfc(1.0) == doctest::Approx(0.157299207050285130658779).epsilon(1e-15));
}

TEST_CASE("pdf") {
  CHECK(normal::pdf(0.0) == doctest::Approx(0.398942280401432677939946).epsilon(1e-15));
  CHECK(normal::pdf(2.0) == doctest::Approx(0.053990966513188051).epsilon(1e-15));
}

TEST_CASE("quantile rejects the boundary") {
  CHECK_THROWS_AS(normal::quantile(0.0), certfeas::DomainError);
  CHECK_THROWS_AS(normal::quantile(1.0), certfeas::DomainError);
  CHECK_THROWS_AS(normal::quantile(std::nan("")), certfeas::DomainError);
}

#pragma once
// Standard normal distribution routines.
//
// The CDF is built on W. J. Cody's rational Chebyshev approximations to erf,
// erfc and the scaled erfcx (Math. Comp. 23, 1969), which are accurate to
// about 18 significant digits before double rounding. The quantile uses
// Acklam's rational inversion (relative error below 1.2e-9) followed by one
// Newton step against normal_cdf, so the pair is internally consistent.

namespace certfeas::normal {

double erfc(double x);
// exp(x^2) * erfc(x); stays finite where erfc underflows.
double erfcx(double x);

double pdf(double z);
double cdf(double z);
// 1 - cdf(z) without cancellation.
double ccdf(double z);
// Inverse of cdf on (0, 1). Throws DomainError at or beyond the boundary.
double quantile(double p);

}  // namespace certfeas::normal

#pragma once

namespace crimereg::special {

/// Hurwitz zeta: sum_{k>=0} (k + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// Standard normal CDF and survival function (upper tail, accurate far out).
double normal_cdf(double x);
double normal_sf(double x);

/// CDF of the chi-square distribution with (possibly fractional) dof.
double chi2_cdf(double x, double dof);

/// Quantile of the chi-square distribution: x with chi2_cdf(x, dof) = p.
double chi2_quantile(double p, double dof);

} // namespace crimereg::special

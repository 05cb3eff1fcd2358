#include "crimereg/special.hpp"

#include "crimereg/error.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crimereg::special {

double hurwitz_zeta(double s, double q) { return Eigen::numext::zeta(s, q); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double chi2_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return Eigen::numext::igamma(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) throw Error("special", "chi2_quantile: invalid arguments");
    double lo = 0.0, hi = std::max(1.0, dof);
    while (chi2_cdf(hi, dof) < p) {
        lo = hi;
        hi *= 2.0;
    }
    // Bisection; the CDF is monotone so this always converges.
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace crimereg::special

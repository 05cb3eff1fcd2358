#pragma once

#include "crimereg/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace crimereg {

/// Cumulative share of crime against cumulative share of regions, regions
/// taken in descending order of count. `points` starts at (0,0) and ends at
/// (1,1) with one point per region in between.
struct LorenzCurve {
    std::vector<std::pair<double, double>> points;
    double gini = 0.0;
};

/// Throws Error("concentration") if the counts are all zero or any is negative.
LorenzCurve lorenz(std::span<const std::int64_t> counts);

/// `cum_share_regions,cum_share_crime`
void write_lorenz(const LorenzCurve& curve, std::ostream& out);

/// Discrete power law p(x) = x^-alpha / zeta(alpha, xmin) on x >= xmin.
class DiscretePowerLaw {
public:
    DiscretePowerLaw(double alpha, std::int64_t xmin);

    double alpha() const { return alpha_; }
    std::int64_t xmin() const { return xmin_; }

    double log_pmf(std::int64_t x) const;
    /// P(X >= x)
    double survival(std::int64_t x) const;

    /// Inverse-CDF draw: the largest x with P(X >= x) >= u for u uniform on
    /// (0,1). Values are capped at 2^62.
    std::int64_t sample(Rng& rng) const;

private:
    double alpha_;
    std::int64_t xmin_;
    double norm_; // zeta(alpha, xmin)
};

struct PowerLawFit {
    double alpha = 0.0;
    std::int64_t xmin = 1;
    double ks_statistic = 1.0;
    std::int64_t n_tail = 0;
    double log_likelihood = 0.0;

    /// Asymptotic standard error (alpha - 1) / sqrt(n_tail).
    double standard_error() const;
    bool valid() const { return alpha > 1.0 && xmin >= 1 && n_tail >= 10; }
};

inline constexpr std::size_t kMinPowerLawObservations = 50;
inline constexpr std::int64_t kMinTail = 10;

/// Discrete maximum-likelihood fit with xmin chosen by minimum KS distance
/// over every observed value that leaves at least ten tail observations.
/// Zero counts are dropped first; at least 50 positive counts are required.
/// For a given xmin alpha maximises the zeta likelihood by golden-section
/// search on [1 + 1e-6, 50] to 1e-6.
PowerLawFit fit_power_law(std::span<const std::int64_t> counts);

/// Same likelihood and KS computation with xmin held fixed.
PowerLawFit fit_power_law(std::span<const std::int64_t> counts, std::int64_t xmin);

enum class Alternative { exponential, lognormal };
enum class Favored { power_law, alternative, inconclusive };

std::string_view to_string(Alternative a);
std::string_view to_string(Favored f);

/// Vuong-normalised log-likelihood ratio R / (sigma sqrt(n)) on the tail
/// x >= fit.xmin. Positive values favour the power law. Both models are
/// discrete on the same support.
struct LikelihoodRatioResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Favored favored = Favored::inconclusive;
    Alternative alternative = Alternative::exponential;
    /// Fitted parameters of the alternative: (lambda) or (mu, sigma).
    std::vector<double> alternative_parameters;
};

LikelihoodRatioResult likelihood_ratio(std::span<const std::int64_t> counts, const PowerLawFit& fit,
                                       Alternative alternative, double significance = 0.05);

/// Semi-parametric bootstrap goodness of fit. Each replicate r draws, using
/// Rng(seed + r), n values: with probability n_tail/n from the fitted power
/// law, otherwise uniformly from the observed values below xmin. The data set
/// is refitted (xmin search included) and the p-value is the fraction of
/// replicates whose KS distance exceeds the observed one.
double gof_bootstrap(std::span<const std::int64_t> counts, const PowerLawFit& fit, int n_boot,
                     std::uint64_t seed = 0, int workers = 1);

} // namespace crimereg

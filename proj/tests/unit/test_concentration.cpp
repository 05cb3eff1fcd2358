#include "crimereg/concentration.hpp"
#include "crimereg/error.hpp"
#include "crimereg/rng.hpp"
#include "crimereg/special.hpp"
#include "crimereg/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace crimereg;

namespace {

double pairwise_gini(const std::vector<std::int64_t>& x) {
    long double diff = 0, total = 0;
    for (auto a : x) {
        total += a;
        for (auto b : x) diff += std::llabs(a - b);
    }
    const long double n = static_cast<long double>(x.size());
    return static_cast<double>(diff / (2 * n * total));
}

/// KS distance between the tail x >= xmin and a discrete exponential fitted
/// by maximum likelihood on that tail.
double exponential_ks(const std::vector<std::int64_t>& data, std::int64_t xmin) {
    std::map<std::int64_t, std::int64_t> freq;
    double n = 0, shift = 0;
    for (auto x : data) {
        if (x < xmin) continue;
        ++freq[x];
        ++n;
        shift += static_cast<double>(x - xmin);
    }
    const double lambda = std::log1p(n / shift);
    double cum = 0, worst = 0;
    for (auto [x, f] : freq) {
        const double model_below = 1 - std::exp(-lambda * static_cast<double>(x - xmin)); // P(X < x)
        worst = std::max(worst, std::abs(cum / n - model_below));
        cum += static_cast<double>(f);
        const double model_upto = 1 - std::exp(-lambda * static_cast<double>(x - xmin + 1));
        worst = std::max(worst, std::abs(cum / n - model_upto));
    }
    return worst;
}

} // namespace

TEST_CASE("Lorenz curve corner cases") {
    const std::vector<std::int64_t> equal{5, 5, 5, 5};
    const auto flat = lorenz(equal);
    CHECK(flat.gini == doctest::Approx(0.0).epsilon(1e-15));
    for (const auto& [r, c] : flat.points) CHECK(c == doctest::Approx(r));

    const std::vector<std::int64_t> one{10, 0, 0, 0};
    CHECK(lorenz(one).gini == doctest::Approx(0.75).epsilon(1e-15));

    CHECK_THROWS_AS(lorenz(std::vector<std::int64_t>{0, 0}), Error);
    CHECK_THROWS_AS(lorenz(std::vector<std::int64_t>{3, -1}), Error);
}

TEST_CASE("Gini matches the pairwise-difference formula") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::int64_t> x(1000);
        for (auto& v : x) v = static_cast<std::int64_t>(rng.below(rep % 3 == 0 ? 5 : 10000));
        CHECK(std::abs(lorenz(x).gini - pairwise_gini(x)) <= 1e-12);
    }
}

TEST_CASE("Lorenz curve shape") {
    Rng rng(3);
    std::vector<std::int64_t> x(300);
    for (auto& v : x) v = static_cast<std::int64_t>(rng.below(100));
    const auto curve = lorenz(x);
    REQUIRE(curve.points.size() == x.size() + 1);
    CHECK(curve.points.front() == std::pair{0.0, 0.0});
    CHECK(curve.points.back().first == doctest::Approx(1.0));
    CHECK(curve.points.back().second == doctest::Approx(1.0));
    double prev_slope = 1e300;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto [r0, c0] = curve.points[i - 1];
        const auto [r1, c1] = curve.points[i];
        CHECK(r1 > r0);
        CHECK(c1 >= c0);
        CHECK(c1 >= r1 - 1e-12); // dominates the diagonal
        const double slope = (c1 - c0) / (r1 - r0);
        CHECK(slope <= prev_slope + 1e-9); // concave
        prev_slope = slope;
    }
}

TEST_CASE("Gini is scale invariant and rises under regressive transfers") {
    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::int64_t> x(50);
        for (auto& v : x) v = 1 + static_cast<std::int64_t>(rng.below(200));
        const double g = lorenz(x).gini;
        auto scaled = x;
        for (auto& v : scaled) v *= 7;
        CHECK(lorenz(scaled).gini == doctest::Approx(g).epsilon(1e-12));

        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        if (*lo == *hi) continue;
        auto moved = x;
        const auto i = static_cast<std::size_t>(lo - x.begin()), j = static_cast<std::size_t>(hi - x.begin());
        moved[i] -= 1;
        moved[j] += 1;
        CHECK(lorenz(moved).gini > g);
    }
}

TEST_CASE("Gini falls as the exponent rises") {
    double prev = 1.0;
    std::uint64_t seed = 40;
    for (double alpha : {2.1, 2.5, 3.0, 4.0}) {
        const double g = lorenz(gen_powerlaw_counts(alpha, 1, 10000, seed++)).gini;
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("discrete power law is normalised") {
    for (double alpha : {1.7, 2.5, 4.0}) {
        for (std::int64_t xmin : {1, 3, 20}) {
            const DiscretePowerLaw law(alpha, xmin);
            CHECK(law.survival(xmin) == doctest::Approx(1.0));
            double mass = 0;
            for (std::int64_t x = xmin; x < xmin + 2000; ++x) {
                const double p = std::exp(law.log_pmf(x));
                CHECK(p == doctest::Approx(law.survival(x) - law.survival(x + 1)).epsilon(1e-9));
                mass += p;
            }
            CHECK(mass + law.survival(xmin + 2000) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("fit recovers the exponent") {
    const auto x = gen_powerlaw_counts(2.5, 1, 50000, 11);
    const auto fit = fit_power_law(x);
    CHECK(fit.valid());
    CHECK(fit.alpha == doctest::Approx(2.5).epsilon(0.02));
    CHECK(fit.standard_error() == doctest::Approx((fit.alpha - 1) / std::sqrt(double(fit.n_tail))));

    const auto shifted = gen_powerlaw_counts(2.2, 5, 20000, 12);
    const auto fixed = fit_power_law(shifted, 5);
    CHECK(fixed.xmin == 5);
    CHECK(fixed.n_tail == 20000);
    CHECK(std::abs(fixed.alpha - 2.2) <= 3 * fixed.standard_error());
}

TEST_CASE("zero counts are ignored by the fit and too few positives are an error") {
    auto x = gen_powerlaw_counts(2.5, 1, 500, 13);
    const auto base = fit_power_law(x);
    x.insert(x.end(), 300, 0);
    const auto with_zeros = fit_power_law(x);
    CHECK(with_zeros.alpha == base.alpha);
    CHECK(with_zeros.xmin == base.xmin);
    CHECK_THROWS_AS(fit_power_law(std::vector<std::int64_t>(49, 3)), Error);
}

TEST_CASE("refitting data drawn from the fitted model stays within 3 standard errors") {
    const auto x = gen_powerlaw_counts(2.7, 1, 5000, 14);
    const auto fit = fit_power_law(x);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto again = fit_power_law(gen_powerlaw_counts(fit.alpha, fit.xmin, static_cast<std::size_t>(fit.n_tail), seed), fit.xmin);
        CHECK(std::abs(again.alpha - fit.alpha) <= 3 * fit.standard_error());
    }
}

TEST_CASE("geometric data: the power law fits worse than the matched exponential") {
    const auto x = gen_exponential_counts(0.15, 1, 5000, 15);
    const auto fit = fit_power_law(x);
    CHECK(fit.ks_statistic > exponential_ks(x, fit.xmin));
}

TEST_CASE("likelihood ratio direction and the inconclusive band") {
    const auto pl = gen_powerlaw_counts(2.5, 1, 10000, 16);
    const auto ex = gen_exponential_counts(0.1, 1, 10000, 17);
    const auto r_pl = likelihood_ratio(pl, fit_power_law(pl, 1), Alternative::exponential);
    const auto r_ex = likelihood_ratio(ex, fit_power_law(ex, 1), Alternative::exponential);
    CHECK(r_pl.favored == Favored::power_law);
    CHECK(r_pl.statistic > 0);
    CHECK(r_ex.favored == Favored::alternative);
    CHECK(r_ex.statistic < 0);
    REQUIRE(r_ex.alternative_parameters.size() == 1);
    CHECK(r_ex.alternative_parameters[0] == doctest::Approx(0.1).epsilon(0.05));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = gen_powerlaw_counts(2.5, 1, 400, 200 + seed);
        const auto fit = fit_power_law(x);
        for (auto alt : {Alternative::exponential, Alternative::lognormal}) {
            const auto r = likelihood_ratio(x, fit, alt);
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
            if (r.p_value > 0.05) CHECK(r.favored == Favored::inconclusive);
            CHECK(likelihood_ratio(x, fit, alt, 0.0).favored == Favored::inconclusive);
        }
    }
}

TEST_CASE("lognormal alternative recovers its parameters") {
    Rng rng(18);
    std::vector<std::int64_t> x(20000);
    for (auto& v : x) v = static_cast<std::int64_t>(std::floor(std::exp(rng.normal(3.0, 0.6))));
    PowerLawFit anchor = fit_power_law(x, 5);
    const auto r = likelihood_ratio(x, anchor, Alternative::lognormal);
    REQUIRE(r.alternative_parameters.size() == 2);
    CHECK(r.alternative_parameters[0] == doctest::Approx(3.0).epsilon(0.05));
    CHECK(r.alternative_parameters[1] == doctest::Approx(0.6).epsilon(0.08));
    CHECK(r.favored == Favored::alternative);
}

TEST_CASE("bootstrap p-values") {
    const auto uniform = [] {
        Rng rng(19);
        std::vector<std::int64_t> x(2000);
        for (auto& v : x) v = 1 + static_cast<std::int64_t>(rng.below(1000));
        return x;
    }();
    const auto ufit = fit_power_law(uniform);
    CHECK(gof_bootstrap(uniform, ufit, 100, 1, 4) < 0.1);
    CHECK_THROWS_AS(gof_bootstrap(uniform, ufit, 99), Error);

    double mean_p = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
        const auto x = gen_powerlaw_counts(2.5, 1, 1000, 300 + run);
        const double p = gof_bootstrap(x, fit_power_law(x), 100, 1000 * run, 4);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        mean_p += p / 20;
    }
    CHECK(mean_p >= 0.3);
    CHECK(mean_p <= 0.7);
}

TEST_CASE("bootstrap is independent of the worker count") {
    const auto x = gen_powerlaw_counts(2.3, 1, 600, 21);
    const auto fit = fit_power_law(x);
    CHECK(gof_bootstrap(x, fit, 120, 9, 1) == gof_bootstrap(x, fit, 120, 9, 6));
}

TEST_CASE("special functions") {
    CHECK(special::hurwitz_zeta(2.0, 1.0) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-12));
    CHECK(special::hurwitz_zeta(3.0, 2.0) == doctest::Approx(1.2020569031595942 - 1).epsilon(1e-12));
    CHECK(special::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(special::chi2_cdf(3.841458820694124, 1) == doctest::Approx(0.95).epsilon(1e-10));
    CHECK(special::chi2_quantile(0.95, 2) == doctest::Approx(5.991464547107979).epsilon(1e-9));
    CHECK(special::chi2_quantile(0.95, 2.4) == doctest::Approx(6.64).epsilon(0.05));
}

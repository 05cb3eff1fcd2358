#include "crimereg/concentration.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"
#include "crimereg/parallel.hpp"
#include "crimereg/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

namespace crimereg {

namespace {

constexpr double kAlphaLow = 1.0 + 1e-6;
constexpr double kAlphaHigh = 50.0;
constexpr double kAlphaTol = 1e-6;
constexpr std::int64_t kSampleCap = std::int64_t{1} << 62;
// Gaps up to this size are walked with zeta(a, x+1) = zeta(a, x) - x^-a.
constexpr std::int64_t kRecurrenceGap = 32;

/// Distinct positive values in ascending order with suffix statistics.
struct Histogram {
    std::vector<std::int64_t> value;
    std::vector<std::int64_t> freq;
    std::vector<std::int64_t> tail_count; // # observations >= value[i]
    std::vector<double> tail_log_sum;     // sum of ln x over observations >= value[i]

    std::size_t size() const { return value.size(); }
};

Histogram make_histogram(std::span<const std::int64_t> counts) {
    std::vector<std::int64_t> xs;
    xs.reserve(counts.size());
    for (auto c : counts) {
        if (c < 0) throw Error("concentration", "negative count");
        if (c > 0) xs.push_back(c);
    }
    std::sort(xs.begin(), xs.end());
    Histogram h;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        h.value.push_back(xs[i]);
        h.freq.push_back(static_cast<std::int64_t>(j - i));
        i = j;
    }
    const std::size_t d = h.size();
    h.tail_count.assign(d + 1, 0);
    h.tail_log_sum.assign(d + 1, 0.0);
    for (std::size_t i = d; i-- > 0;) {
        h.tail_count[i] = h.tail_count[i + 1] + h.freq[i];
        h.tail_log_sum[i] = h.tail_log_sum[i + 1] + static_cast<double>(h.freq[i]) * std::log(static_cast<double>(h.value[i]));
    }
    return h;
}

double power_law_loglik(double alpha, std::int64_t xmin, std::int64_t n, double log_sum) {
    return -static_cast<double>(n) * std::log(special::hurwitz_zeta(alpha, static_cast<double>(xmin))) -
           alpha * log_sum;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Exact supremum over the integers of |F_emp - F_model| for the tail that
/// starts at histogram index `first`, with the model supported on x >= xmin.
double ks_distance(const Histogram& h, std::size_t first, std::int64_t xmin, double alpha) {
    const double n = static_cast<double>(h.tail_count[first]);
    const double norm = special::hurwitz_zeta(alpha, static_cast<double>(xmin));
    double zeta_at = h.value[first] == xmin ? norm : special::hurwitz_zeta(alpha, static_cast<double>(h.value[first]));
    double seen = 0.0;
    // Just below the first observation the empirical CDF is zero.
    double ks = std::abs(1.0 - zeta_at / norm);
    for (std::size_t j = first; j < h.size(); ++j) {
        const auto v = h.value[j];
        seen += static_cast<double>(h.freq[j]);
        const double emp = seen / n;
        const double zeta_next = zeta_at - std::pow(static_cast<double>(v), -alpha); // zeta(alpha, v+1)
        ks = std::max(ks, std::abs(emp - (1.0 - zeta_next / norm)));
        if (j + 1 == h.size()) break;
        const auto w = h.value[j + 1];
        double zeta_w;
        if (w - (v + 1) <= kRecurrenceGap) {
            zeta_w = zeta_next;
            for (std::int64_t x = v + 1; x < w; ++x) zeta_w -= std::pow(static_cast<double>(x), -alpha);
        } else {
            zeta_w = special::hurwitz_zeta(alpha, static_cast<double>(w));
        }
        // Just below w the empirical CDF is still `emp`.
        ks = std::max(ks, std::abs(emp - (1.0 - zeta_w / norm)));
        zeta_at = zeta_w;
    }
    return ks;
}

PowerLawFit fit_at(const Histogram& h, std::size_t first, std::int64_t xmin) {
    const auto n = h.tail_count[first];
    const double log_sum = h.tail_log_sum[first];
    auto ll = [&](double a) { return power_law_loglik(a, xmin, n, log_sum); };
    PowerLawFit fit;
    fit.xmin = xmin;
    fit.n_tail = n;
    fit.alpha = golden_section_max(ll, kAlphaLow, kAlphaHigh, kAlphaTol);
    fit.log_likelihood = ll(fit.alpha);
    fit.ks_statistic = ks_distance(h, first, xmin, fit.alpha);
    return fit;
}

// Minimises f over R^2 with the standard Nelder-Mead moves.
bool nelder_mead(const std::function<double(const std::array<double, 2>&)>& f, std::array<double, 2>& x,
                 std::array<double, 2> step, int max_iter = 5000, double tol = 1e-11) {
    std::array<std::array<double, 2>, 3> p{x, x, x};
    p[1][0] += step[0];
    p[2][1] += step[1];
    std::array<double, 3> fv{f(p[0]), f(p[1]), f(p[2])};
    for (int it = 0; it < max_iter; ++it) {
        std::array<int, 3> o{0, 1, 2};
        std::sort(o.begin(), o.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const auto best = o[0], mid = o[1], worst = o[2];
        if (std::abs(fv[worst] - fv[best]) <= tol * (std::abs(fv[best]) + tol)) {
            x = p[best];
            return std::isfinite(fv[best]);
        }
        std::array<double, 2> c{0.5 * (p[best][0] + p[mid][0]), 0.5 * (p[best][1] + p[mid][1])};
        auto along = [&](double t) {
            return std::array<double, 2>{c[0] + t * (p[worst][0] - c[0]), c[1] + t * (p[worst][1] - c[1])};
        };
        const auto r = along(-1.0);
        const double fr = f(r);
        if (fr < fv[best]) {
            const auto e = along(-2.0);
            const double fe = f(e);
            if (fe < fr) {
                p[worst] = e;
                fv[worst] = fe;
            } else {
                p[worst] = r;
                fv[worst] = fr;
            }
        } else if (fr < fv[mid]) {
            p[worst] = r;
            fv[worst] = fr;
        } else {
            const auto k = fr < fv[worst] ? along(-0.5) : along(0.5);
            const double fk = f(k);
            if (fk < std::min(fr, fv[worst])) {
                p[worst] = k;
                fv[worst] = fk;
            } else {
                for (int i : {mid, worst}) {
                    p[i] = {0.5 * (p[i][0] + p[best][0]), 0.5 * (p[i][1] + p[best][1])};
                    fv[i] = f(p[i]);
                }
            }
        }
    }
    return false;
}

/// Log of Phi(b) - Phi(a) for a < b, evaluated on the side of the
/// distribution where it does not cancel.
double log_normal_mass(double a, double b) {
    double mass = a > 0.0 ? special::normal_sf(a) - special::normal_sf(b) : special::normal_cdf(b) - special::normal_cdf(a);
    if (mass > 0.0) return std::log(mass);
    // Far tail: midpoint density times width.
    const double m = 0.5 * (a + b);
    return -0.5 * m * m - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(b - a);
}

double log_normal_sf(double z) {
    const double s = special::normal_sf(z);
    if (s > 0.0) return std::log(s);
    // Mills ratio asymptote.
    return -0.5 * z * z - std::log(z * std::sqrt(2.0 * std::numbers::pi));
}

/// Per-value log pmf of the discretised lognormal truncated to x >= xmin.
double lognormal_log_pmf(std::int64_t x, std::int64_t xmin, double mu, double sigma) {
    auto z = [&](double t) { return (std::log(t) - mu) / sigma; };
    const double xd = static_cast<double>(x);
    return log_normal_mass(z(xd - 0.5), z(xd + 0.5)) - log_normal_sf(z(static_cast<double>(xmin) - 0.5));
}

} // namespace

LorenzCurve lorenz(std::span<const std::int64_t> counts) {
    std::vector<std::int64_t> xs(counts.begin(), counts.end());
    if (xs.empty()) throw Error("concentration", "lorenz: empty count vector");
    if (std::any_of(xs.begin(), xs.end(), [](auto c) { return c < 0; }))
        throw Error("concentration", "lorenz: negative count");
    const double total = static_cast<double>(std::accumulate(xs.begin(), xs.end(), std::int64_t{0}));
    if (!(total > 0.0)) throw Error("concentration", "lorenz: all counts are zero");

    std::sort(xs.begin(), xs.end(), std::greater<>());
    const double n = static_cast<double>(xs.size());
    LorenzCurve curve;
    curve.points.reserve(xs.size() + 1);
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t cum = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cum += xs[i];
        curve.points.emplace_back(static_cast<double>(i + 1) / n, static_cast<double>(cum) / total);
    }
    curve.points.back() = {1.0, 1.0};

    // Ascending rank form: G = 2 sum_i i x_(i) / (n sum x) - (n + 1) / n.
    double weighted = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double rank_asc = n - static_cast<double>(i);
        weighted += rank_asc * static_cast<double>(xs[i]);
    }
    curve.gini = 2.0 * weighted / (n * total) - (n + 1.0) / n;
    return curve;
}

void write_lorenz(const LorenzCurve& curve, std::ostream& out) {
    out << "cum_share_regions,cum_share_crime\n";
    for (const auto& [r, c] : curve.points) out << csv::format(r) << ',' << csv::format(c) << '\n';
}

DiscretePowerLaw::DiscretePowerLaw(double alpha, std::int64_t xmin) : alpha_(alpha), xmin_(xmin) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw Error("concentration", "power law requires alpha > 1");
    if (xmin < 1) throw Error("concentration", "power law requires xmin >= 1");
    norm_ = special::hurwitz_zeta(alpha, static_cast<double>(xmin));
}

double DiscretePowerLaw::log_pmf(std::int64_t x) const {
    if (x < xmin_) return -std::numeric_limits<double>::infinity();
    return -alpha_ * std::log(static_cast<double>(x)) - std::log(norm_);
}

double DiscretePowerLaw::survival(std::int64_t x) const {
    if (x <= xmin_) return 1.0;
    return special::hurwitz_zeta(alpha_, static_cast<double>(x)) / norm_;
}

std::int64_t DiscretePowerLaw::sample(Rng& rng) const {
    const double u = rng.uniform_open();
    std::int64_t lo = xmin_; // survival(lo) >= u
    std::int64_t hi = xmin_;
    std::int64_t step = 1;
    do {
        if (hi > kSampleCap - step) return kSampleCap;
        lo = hi;
        hi += step;
        step *= 2;
    } while (survival(hi) >= u);
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (survival(mid) >= u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double PowerLawFit::standard_error() const {
    return n_tail > 0 ? (alpha - 1.0) / std::sqrt(static_cast<double>(n_tail)) : std::numeric_limits<double>::infinity();
}

PowerLawFit fit_power_law(std::span<const std::int64_t> counts) {
    const Histogram h = make_histogram(counts);
    const auto n = h.size() ? h.tail_count[0] : 0;
    if (static_cast<std::size_t>(n) < kMinPowerLawObservations)
        throw Error("concentration", "power-law fit needs at least " + std::to_string(kMinPowerLawObservations) +
                                         " positive observations, got " + std::to_string(n));
    PowerLawFit best;
    bool found = false;
    for (std::size_t i = 0; i < h.size() && h.tail_count[i] >= kMinTail; ++i) {
        const auto fit = fit_at(h, i, h.value[i]);
        if (!found || fit.ks_statistic < best.ks_statistic) {
            best = fit;
            found = true;
        }
    }
    if (!found) throw Error("concentration", "no xmin leaves at least 10 tail observations");
    return best;
}

PowerLawFit fit_power_law(std::span<const std::int64_t> counts, std::int64_t xmin) {
    const Histogram h = make_histogram(counts);
    const auto it = std::lower_bound(h.value.begin(), h.value.end(), xmin);
    const auto first = static_cast<std::size_t>(it - h.value.begin());
    if (first >= h.size() || h.tail_count[first] < kMinTail)
        throw Error("concentration", "xmin " + std::to_string(xmin) + " leaves fewer than 10 tail observations");
    return fit_at(h, first, xmin);
}

std::string_view to_string(Alternative a) {
    return a == Alternative::exponential ? "exponential" : "lognormal";
}

std::string_view to_string(Favored f) {
    switch (f) {
    case Favored::power_law: return "power_law";
    case Favored::alternative: return "alternative";
    case Favored::inconclusive: break;
    }
    return "inconclusive";
}

LikelihoodRatioResult likelihood_ratio(std::span<const std::int64_t> counts, const PowerLawFit& fit,
                                       Alternative alternative, double significance) {
    if (!fit.valid()) throw Error("concentration", "likelihood ratio needs a valid power-law fit");
    const Histogram all = make_histogram(counts);
    Histogram h;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all.value[i] >= fit.xmin) {
            h.value.push_back(all.value[i]);
            h.freq.push_back(all.freq[i]);
        }
    }
    std::int64_t n = 0;
    double sum_shift = 0.0;
    for (std::size_t i = 0; i < h.value.size(); ++i) {
        n += h.freq[i];
        sum_shift += static_cast<double>(h.freq[i]) * static_cast<double>(h.value[i] - fit.xmin);
    }
    if (n < kMinTail) throw Error("concentration", "likelihood ratio: tail too small");

    const DiscretePowerLaw pl(fit.alpha, fit.xmin);
    LikelihoodRatioResult out;
    out.alternative = alternative;
    std::vector<double> alt_log_pmf(h.value.size());

    if (alternative == Alternative::exponential) {
        const double mean_shift = sum_shift / static_cast<double>(n);
        if (!(mean_shift > 0.0)) throw Error("concentration", "exponential MLE failed to converge: degenerate tail");
        // p(x) = (1 - e^-lambda) e^{-lambda (x - xmin)}
        const double lambda = std::log1p(1.0 / mean_shift);
        const double log_norm = std::log(-std::expm1(-lambda));
        for (std::size_t i = 0; i < h.value.size(); ++i)
            alt_log_pmf[i] = log_norm - lambda * static_cast<double>(h.value[i] - fit.xmin);
        out.alternative_parameters = {lambda};
    } else {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < h.value.size(); ++i) {
            const double l = std::log(static_cast<double>(h.value[i]));
            m1 += static_cast<double>(h.freq[i]) * l;
            m2 += static_cast<double>(h.freq[i]) * l * l;
        }
        m1 /= static_cast<double>(n);
        const double var = std::max(m2 / static_cast<double>(n) - m1 * m1, 1e-4);
        auto nll = [&](const std::array<double, 2>& p) {
            const double sigma = std::exp(p[1]);
            double s = 0.0;
            for (std::size_t i = 0; i < h.value.size(); ++i)
                s -= static_cast<double>(h.freq[i]) * lognormal_log_pmf(h.value[i], fit.xmin, p[0], sigma);
            return std::isfinite(s) ? s : std::numeric_limits<double>::max();
        };
        std::array<double, 2> p{m1, 0.5 * std::log(var)};
        if (!nelder_mead(nll, p, {0.5, 0.5}))
            throw Error("concentration", "lognormal MLE failed to converge");
        const double sigma = std::exp(p[1]);
        for (std::size_t i = 0; i < h.value.size(); ++i)
            alt_log_pmf[i] = lognormal_log_pmf(h.value[i], fit.xmin, p[0], sigma);
        out.alternative_parameters = {p[0], sigma};
    }

    double total = 0.0;
    for (std::size_t i = 0; i < h.value.size(); ++i)
        total += static_cast<double>(h.freq[i]) * (pl.log_pmf(h.value[i]) - alt_log_pmf[i]);
    const double mean = total / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < h.value.size(); ++i) {
        const double d = pl.log_pmf(h.value[i]) - alt_log_pmf[i] - mean;
        var += static_cast<double>(h.freq[i]) * d * d;
    }
    var /= static_cast<double>(n);

    if (var > 0.0 && std::isfinite(var)) {
        out.statistic = total / (std::sqrt(static_cast<double>(n)) * std::sqrt(var));
        out.p_value = std::erfc(std::abs(out.statistic) / std::numbers::sqrt2);
    } else {
        out.statistic = 0.0;
        out.p_value = 1.0;
    }
    if (out.p_value <= significance && out.statistic != 0.0) {
        out.favored = out.statistic > 0.0 ? Favored::power_law : Favored::alternative;
    }
    return out;
}

double gof_bootstrap(std::span<const std::int64_t> counts, const PowerLawFit& fit, int n_boot, std::uint64_t seed,
                     int workers) {
    if (n_boot < 100) throw Error("concentration", "gof_bootstrap needs n_boot >= 100");
    if (!fit.valid()) throw Error("concentration", "gof_bootstrap needs a valid power-law fit");
    std::vector<std::int64_t> below;
    std::size_t n = 0;
    for (auto c : counts) {
        if (c <= 0) continue;
        ++n;
        if (c < fit.xmin) below.push_back(c);
    }
    const double p_tail = static_cast<double>(fit.n_tail) / static_cast<double>(n);
    const DiscretePowerLaw model(fit.alpha, fit.xmin);

    // 1 = exceeds, 0 = does not, -1 = refit impossible.
    std::vector<int> outcome(static_cast<std::size_t>(n_boot), 0);
    parallel_for(outcome.size(), workers, [&](std::size_t r) {
        Rng rng(seed + r);
        std::vector<std::int64_t> synthetic(n);
        for (auto& x : synthetic) {
            if (below.empty() || rng.uniform() < p_tail) {
                x = model.sample(rng);
            } else {
                x = below[static_cast<std::size_t>(rng.below(below.size()))];
            }
        }
        try {
            outcome[r] = fit_power_law(synthetic).ks_statistic > fit.ks_statistic ? 1 : 0;
        } catch (const Error&) {
            outcome[r] = -1;
        }
    });
    const auto ok = std::count_if(outcome.begin(), outcome.end(), [](int o) { return o >= 0; });
    if (ok == 0) throw Error("concentration", "gof_bootstrap: no replicate could be refitted");
    const auto exceed = std::count(outcome.begin(), outcome.end(), 1);
    return static_cast<double>(exceed) / static_cast<double>(ok);
}

} // namespace crimereg

#include "crimereg/synth.hpp"

#include "crimereg/concentration.hpp"
#include "crimereg/error.hpp"
#include "crimereg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crimereg {

std::vector<std::int64_t> gen_powerlaw_counts(double alpha, std::int64_t xmin, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 1.0) || xmin < 1) throw Error("synth", "power law needs alpha > 1 and xmin >= 1");
    const DiscretePowerLaw law(alpha, xmin);
    Rng rng(seed);
    std::vector<std::int64_t> out(n);
    for (auto& x : out) x = law.sample(rng);
    return out;
}

std::vector<std::int64_t> gen_exponential_counts(double lambda, std::int64_t xmin, std::size_t n,
                                                 std::uint64_t seed) {
    if (!(lambda > 0.0) || xmin < 1) throw Error("synth", "exponential counts need lambda > 0 and xmin >= 1");
    Rng rng(seed);
    std::vector<std::int64_t> out(n);
    // Inverse CDF of the geometric tail: P(X - xmin >= k) = exp(-lambda k).
    for (auto& x : out) x = xmin + static_cast<std::int64_t>(std::floor(-std::log(rng.uniform_open()) / lambda));
    return out;
}

TimeSeries<double> gen_ar1(double a, std::size_t n, std::uint64_t seed) {
    if (!(std::abs(a) < 1.0)) throw Error("synth", "AR(1) needs |a| < 1");
    constexpr std::size_t burn_in = 1000;
    Rng rng(seed);
    TimeSeries<double> y;
    y.values.resize(static_cast<Eigen::Index>(n));
    double x = 0.0;
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        x = a * x + rng.normal();
        if (t >= burn_in) y.values(static_cast<Eigen::Index>(t - burn_in)) = x;
    }
    return y;
}

TimeSeries<double> gen_seasonal(double period_years, double amplitude, double noise_sd, std::size_t n,
                                std::uint64_t seed) {
    TimeSeries<double> y;
    if (!(period_years > 0.0) || static_cast<double>(n) * y.dt < 2.0 * period_years)
        throw Error("synth", "period is not resolvable: need n * dt >= 2 * period");
    if (noise_sd < 0.0) throw Error("synth", "noise_sd must be non-negative");
    Rng rng(seed);
    y.values.resize(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) * y.dt / period_years;
        y.values(static_cast<Eigen::Index>(t)) = amplitude * std::sin(phase) + noise_sd * rng.normal();
    }
    return y;
}

RegionSeriesSet gen_traveling_wave_city(const TravelingWaveParams& p, std::uint64_t seed) {
    if (p.regions < 4) throw Error("synth", "traveling wave city needs at least 4 regions");
    if (p.weeks < 2 || p.window_weeks < 1 || p.window_weeks > p.weeks)
        throw Error("synth", "window must satisfy 1 <= window_weeks <= weeks");
    if (p.wave_speed < 0.0 || p.noise_sd < 0.0 || !(p.period_years > 0.0))
        throw Error("synth", "invalid traveling wave parameters");

    RegionSeriesSet set;
    const Date origin{std::chrono::days{14613}}; // 2010-01-04
    for (int t = 0; t < p.weeks; ++t) set.week_starts.push_back(origin + std::chrono::days{7 * t});
    set.counts.resize(p.weeks, p.regions);
    Rng rng(seed);
    const double dt = 1.0 / kWeeksPerYear;
    for (int i = 0; i < p.regions; ++i) {
        set.region_ids.push_back(i);
        const bool stationary = p.wave_speed == 0.0 || p.window_weeks >= p.weeks;
        const auto start = stationary ? 0L : std::lround(static_cast<double>(i) * kWeeksPerYear / p.wave_speed) % p.weeks;
        for (int t = 0; t < p.weeks; ++t) {
            const long offset = ((t - start) % p.weeks + p.weeks) % p.weeks;
            const bool active = stationary || offset < p.window_weeks;
            const double cycle = std::sin(2.0 * std::numbers::pi * t * dt / p.period_years);
            set.counts(t, i) = (active ? p.amplitude * cycle : 0.0) + p.noise_sd * rng.normal();
        }
    }
    set.city = set.counts.rowwise().sum();
    return set;
}

std::vector<PopulationCell> gen_clustered_population(int cells, std::uint64_t seed, double extent,
                                                     double origin_lon, double origin_lat) {
    if (cells < 1 || !(extent > 0.0)) throw Error("synth", "clustered population needs cells >= 1 and extent > 0");
    Rng rng(seed);
    std::vector<PopulationCell> out;
    out.reserve(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) {
        const double u = rng.uniform();
        double x, y;
        if (u < 0.4) {
            x = rng.normal(0.3, 0.08);
            y = rng.normal(0.35, 0.08);
        } else if (u < 0.7) {
            x = rng.normal(0.7, 0.12);
            y = rng.normal(0.65, 0.10);
        } else {
            x = rng.uniform();
            y = rng.uniform();
        }
        const double pop = std::max(1.0, std::round(std::exp(rng.normal(5.0, 0.8))));
        out.push_back({origin_lon + extent * x, origin_lat + extent * y, pop});
    }
    return out;
}

EventCity gen_event_city(const EventCityParams& p, std::uint64_t seed) {
    if (p.grid < 2 || p.weeks < 2 || !(p.cell_size > 0.0) || !(p.events_per_week > 0.0) || !(p.hotspot_alpha > 1.0))
        throw Error("synth", "invalid event city parameters");
    Rng rng(seed);
    EventCity city;
    const int cells = p.grid * p.grid;

    // Two residential clusters over a thin uniform floor.
    const double g = static_cast<double>(p.grid);
    std::vector<double> weight(static_cast<std::size_t>(cells));
    const DiscretePowerLaw propensity(p.hotspot_alpha, 1);
    double weight_sum = 0.0;
    for (int r = 0; r < p.grid; ++r) {
        for (int c = 0; c < p.grid; ++c) {
            const double u = (c + 0.5) / g, v = (r + 0.5) / g;
            const double d1 = (u - 0.3) * (u - 0.3) + (v - 0.35) * (v - 0.35);
            const double d2 = (u - 0.7) * (u - 0.7) + (v - 0.65) * (v - 0.65);
            const double density = 50.0 + 2000.0 * std::exp(-d1 / 0.02) + 1200.0 * std::exp(-d2 / 0.03);
            const double pop = std::round(density * (0.75 + 0.5 * rng.uniform()));
            city.population.push_back({p.origin_lon + (c + 0.5) * p.cell_size, p.origin_lat + (r + 0.5) * p.cell_size, pop});
            const double w = static_cast<double>(propensity.sample(rng));
            weight[static_cast<std::size_t>(r * p.grid + c)] = w;
            weight_sum += w;
        }
    }

    const double lon_lo = city.population.front().lon, lon_hi = city.population.back().lon;
    const double lat_lo = city.population.front().lat, lat_hi = city.population.back().lat;
    static constexpr const char* kCategories[] = {"theft", "theft", "theft", "robbery", "burglary"};
    const std::int64_t week_seconds = 7 * 86400;
    const std::int64_t start = p.start_date_days * 86400;
    city.events.source_id = "synthetic:event_city";
    for (int t = 0; t < p.weeks; ++t) {
        const double season = 1.0 + p.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * t / kWeeksPerYear);
        for (int k = 0; k < cells; ++k) {
            const double lambda = p.events_per_week * season * weight[static_cast<std::size_t>(k)] / weight_sum;
            const auto n = rng.poisson(lambda);
            const auto& cell = city.population[static_cast<std::size_t>(k)];
            for (std::int64_t e = 0; e < n; ++e) {
                EventRecord rec;
                const auto offset = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(week_seconds)));
                rec.timestamp = Instant{std::chrono::seconds{start + t * week_seconds + offset}};
                rec.lon = std::clamp(cell.lon + (rng.uniform() - 0.5) * p.cell_size, lon_lo, lon_hi);
                rec.lat = std::clamp(cell.lat + (rng.uniform() - 0.5) * p.cell_size, lat_lo, lat_hi);
                rec.category = kCategories[rng.below(5)];
                city.events.records.push_back(std::move(rec));
            }
        }
    }
    std::stable_sort(city.events.records.begin(), city.events.records.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    return city;
}

} // namespace crimereg

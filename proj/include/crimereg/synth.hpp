#pragma once

#include "crimereg/ingest.hpp"
#include "crimereg/rhythms/time_series.hpp"
#include "crimereg/series.hpp"

#include <cstdint>
#include <vector>

namespace crimereg {

/// i.i.d. discrete power-law counts on x >= xmin via inverse CDF.
std::vector<std::int64_t> gen_powerlaw_counts(double alpha, std::int64_t xmin, std::size_t n, std::uint64_t seed);

/// Discrete exponential (shifted geometric) counts with P(X = x) proportional
/// to exp(-lambda (x - xmin)), x >= xmin.
std::vector<std::int64_t> gen_exponential_counts(double lambda, std::int64_t xmin, std::size_t n, std::uint64_t seed);

/// x_t = a x_{t-1} + e_t with standard normal innovations, starting from 0
/// and discarding a 1000-step burn-in. Weekly spacing.
TimeSeries<double> gen_ar1(double a, std::size_t n, std::uint64_t seed);

/// amplitude * sin(2 pi t dt / period) + N(0, noise_sd^2), t = 0..n-1.
TimeSeries<double> gen_seasonal(double period_years, double amplitude, double noise_sd, std::size_t n,
                                std::uint64_t seed);

struct TravelingWaveParams {
    int regions = 40;
    int weeks = 520;
    int window_weeks = 156;
    /// Regions per year the active window advances by; region i's window
    /// starts i * 52 / wave_speed weeks in (mod weeks). Zero means no
    /// windowing: every region carries the cycle throughout.
    double wave_speed = 4.0;
    double amplitude = 1.0;
    double noise_sd = 0.5;
    double period_years = 1.0;
};

/// Each region carries an annual sinusoid (common phase) only inside its own
/// window, plus independent noise. The city sum keeps a stationary cycle while
/// every region is non-stationary.
RegionSeriesSet gen_traveling_wave_city(const TravelingWaveParams& p, std::uint64_t seed);

/// Irregularly placed cell centroids in a unit-degree-scaled box: 40% around
/// one dense centre, 30% around a wider second centre and 30% uniform, with
/// log-normal cell populations (median about 150 residents).
std::vector<PopulationCell> gen_clustered_population(int cells, std::uint64_t seed, double extent = 0.2,
                                                     double origin_lon = -87.9, double origin_lat = 41.7);

struct EventCityParams {
    int grid = 16;                 // grid x grid population cells
    double cell_size = 0.01;       // degrees
    double origin_lon = -87.9;
    double origin_lat = 41.7;
    int weeks = 260;
    double events_per_week = 300.0;
    double hotspot_alpha = 2.5;    // power-law exponent of per-cell crime propensity
    double seasonal_amplitude = 0.4;
    std::int64_t start_date_days = 14613; // 2010-01-04, a Monday
};

struct EventCity {
    std::vector<PopulationCell> population;
    EventTable events;
};

/// Point events on a clustered population grid with heavy-tailed per-cell
/// propensity and an annual modulation of the weekly rate. Categories are
/// theft, robbery and burglary in proportion 6:2:2.
EventCity gen_event_city(const EventCityParams& p, std::uint64_t seed);

} // namespace crimereg

#include "crimereg/error.hpp"
#include "crimereg/rhythms.hpp"
#include "crimereg/special.hpp"
#include "crimereg/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace crimereg;

TEST_CASE("power-law counts match the zeta moments") {
    // alpha = 3.5 has a finite variance: check the mean against its exact SE.
    const std::size_t n = 200000;
    const auto x = gen_powerlaw_counts(3.5, 1, n, 1);
    const double z = special::hurwitz_zeta(3.5, 1.0);
    const double mean = special::hurwitz_zeta(2.5, 1.0) / z;
    const double var = special::hurwitz_zeta(1.5, 1.0) / z - mean * mean;
    double sample_mean = 0;
    for (auto v : x) sample_mean += static_cast<double>(v) / static_cast<double>(n);
    CHECK(std::abs(sample_mean - mean) <= 4 * std::sqrt(var / static_cast<double>(n)));

    // alpha = 2.5: check point masses, which are binomial.
    const auto y = gen_powerlaw_counts(2.5, 1, n, 2);
    const double zy = special::hurwitz_zeta(2.5, 1.0);
    for (std::int64_t k : {1, 2, 5}) {
        const double p = std::pow(double(k), -2.5) / zy;
        const double freq = static_cast<double>(std::count(y.begin(), y.end(), k)) / static_cast<double>(n);
        CHECK(std::abs(freq - p) <= 4 * std::sqrt(p * (1 - p) / static_cast<double>(n)));
    }
    CHECK(*std::min_element(y.begin(), y.end()) == 1);

    const auto shifted = gen_powerlaw_counts(2.5, 7, 1000, 3);
    CHECK(*std::min_element(shifted.begin(), shifted.end()) == 7);
}

TEST_CASE("steep power law concentrates on xmin") {
    const auto x = gen_powerlaw_counts(10.0, 3, 10000, 4);
    const double p = std::pow(3.0, -10.0) / special::hurwitz_zeta(10.0, 3.0);
    const double at_min = static_cast<double>(std::count(x.begin(), x.end(), 3));
    CHECK(std::abs(at_min - 1e4 * p) <= 4 * std::sqrt(1e4 * p * (1 - p)));
    const auto ones = gen_powerlaw_counts(10.0, 1, 10000, 4);
    CHECK(std::count(ones.begin(), ones.end(), 1) >= 9980);
    CHECK_THROWS_AS(gen_powerlaw_counts(1.0, 1, 10, 1), Error);
    CHECK_THROWS_AS(gen_powerlaw_counts(2.0, 0, 10, 1), Error);
}

TEST_CASE("exponential counts have the geometric mean") {
    const double lambda = 0.2;
    const auto x = gen_exponential_counts(lambda, 2, 100000, 5);
    double m = 0;
    for (auto v : x) m += static_cast<double>(v - 2) / 1e5;
    const double q = std::exp(-lambda);
    CHECK(m == doctest::Approx(q / (1 - q)).epsilon(0.02));
}

TEST_CASE("generators are deterministic in the seed") {
    CHECK(gen_powerlaw_counts(2.5, 1, 500, 9) == gen_powerlaw_counts(2.5, 1, 500, 9));
    CHECK(gen_powerlaw_counts(2.5, 1, 500, 9) != gen_powerlaw_counts(2.5, 1, 500, 10));
    CHECK(gen_ar1(0.5, 300, 1).values == gen_ar1(0.5, 300, 1).values);
    CHECK(gen_clustered_population(100, 3) == gen_clustered_population(100, 3));
    const auto a = gen_traveling_wave_city({}, 4), b = gen_traveling_wave_city({}, 4);
    CHECK(a.counts == b.counts);
}

TEST_CASE("AR(1) lag-1 autocorrelation") {
    const std::size_t n = 10000;
    const auto noise = gen_ar1(0.0, n, 6);
    CHECK(std::abs(lag1_autocorrelation(noise)) < 3.0 / std::sqrt(double(n)));
    const double r = lag1_autocorrelation(gen_ar1(0.7, n, 7));
    CHECK(r >= 0.65);
    CHECK(r <= 0.75);
    CHECK_THROWS_AS(gen_ar1(1.0, 10, 1), Error);
}

TEST_CASE("seasonal series") {
    const auto clean = gen_seasonal(1.0, 2.0, 0.0, 260, 8);
    for (Eigen::Index t = 0; t < clean.size(); ++t)
        CHECK(clean.values(t) == doctest::Approx(2.0 * std::sin(2 * std::numbers::pi * double(t) / 52.0)).scale(1.0));

    const auto noise = gen_seasonal(1.0, 0.0, 1.0, 520, 8);
    const auto ar = gen_ar1(0.0, 520, 8);
    CHECK(noise.values.size() == 520);
    CHECK(std::abs(noise.values.mean()) < 0.2);
    CHECK(std::abs(lag1_autocorrelation(noise)) < 3.0 / std::sqrt(520.0));
    CHECK(ar.values.size() == 520);

    CHECK_THROWS_AS(gen_seasonal(3.0, 1.0, 0.0, 300, 1), Error);
    CHECK_NOTHROW(gen_seasonal(3.0, 1.0, 0.0, 312, 1));
}

TEST_CASE("traveling wave city") {
    TravelingWaveParams p;
    p.regions = 8;
    p.weeks = 260;
    p.window_weeks = 100;
    p.noise_sd = 0.0;
    const auto wave = gen_traveling_wave_city(p, 1);
    CHECK(wave.regions() == 8);
    CHECK(wave.weeks() == 260);
    CHECK((wave.city - wave.counts.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
    // Region 0 starts at week 0 and goes quiet after the window.
    CHECK(wave.counts.col(0).segment(100, 160).cwiseAbs().maxCoeff() == 0.0);
    CHECK(wave.counts.col(0).head(100).cwiseAbs().maxCoeff() > 0.9);

    auto still = p;
    still.wave_speed = 0.0;
    auto full = p;
    full.window_weeks = p.weeks;
    const auto a = gen_traveling_wave_city(still, 1), b = gen_traveling_wave_city(full, 1);
    CHECK(a.counts == b.counts);
    for (int i = 1; i < p.regions; ++i) CHECK(a.counts.col(i) == a.counts.col(0));

    auto bad = p;
    bad.window_weeks = p.weeks + 1;
    CHECK_THROWS_AS(gen_traveling_wave_city(bad, 1), Error);
    bad = p;
    bad.regions = 3;
    CHECK_THROWS_AS(gen_traveling_wave_city(bad, 1), Error);
}

TEST_CASE("event city") {
    EventCityParams p;
    p.grid = 6;
    p.weeks = 20;
    p.events_per_week = 100;
    const auto city = gen_event_city(p, 5);
    CHECK(city.population.size() == 36);
    const auto& ev = city.events.records;
    double expected = 0;
    for (int t = 0; t < p.weeks; ++t)
        expected += p.events_per_week * (1 + p.seasonal_amplitude * std::sin(2 * std::numbers::pi * t / 52.0));
    CHECK(std::abs(static_cast<double>(ev.size()) - expected) <= 4 * std::sqrt(expected));
    CHECK(std::is_sorted(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
    for (const auto& e : ev) {
        CHECK(e.lon >= city.population.front().lon);
        CHECK(e.lon <= city.population.back().lon);
        CHECK(e.lat >= city.population.front().lat);
        CHECK(e.lat <= city.population.back().lat);
    }
    const auto theft = std::count_if(ev.begin(), ev.end(), [](const auto& e) { return e.category == "theft"; });
    CHECK(static_cast<double>(theft) / static_cast<double>(ev.size()) == doctest::Approx(0.6).epsilon(0.1));
}

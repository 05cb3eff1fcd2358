#include "crimereg/error.hpp"
#include "crimereg/rhythms.hpp"
#include "crimereg/rng.hpp"
#include "crimereg/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crimereg;

namespace {

constexpr double kPi = std::numbers::pi;

TimeSeries<double> white(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    TimeSeries<double> y;
    y.values.resize(static_cast<Eigen::Index>(n));
    for (auto& v : y.values) v = rng.normal();
    return y;
}

TimeSeries<double> sinusoid(Eigen::Index n, double period_years, double phase = 0.0) {
    TimeSeries<double> y;
    y.values.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) y.values(t) = std::sin(2 * kPi * double(t) * y.dt / period_years + phase);
    return y;
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd da = a.array() - a.mean(), db = b.array() - b.mean();
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

Eigen::Index argmax(const Eigen::VectorXd& v) {
    Eigen::Index i;
    v.maxCoeff(&i);
    return i;
}

} // namespace

TEST_CASE("trend removal") {
    TimeSeries<double> ramp;
    ramp.values = Eigen::VectorXd::LinSpaced(300, -4.0, 11.0);
    CHECK(remove_trend(ramp).values.cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(detrend(ramp), Error);

    // A 52-week cycle loses only the moving average's small gain.
    const auto y = sinusoid(520, 1.0);
    const auto r = remove_trend(y).values;
    const double f = 1.0 / 52.0;
    const double gain = std::sin(53 * kPi * f) / (53 * std::sin(kPi * f));
    for (Eigen::Index t = 26; t < 520 - 26; ++t) CHECK(r(t) == doctest::Approx((1 - gain) * y.values(t)).epsilon(1e-9));
    const double ratio = r.segment(26, 468).cwiseAbs().maxCoeff() / y.values.segment(26, 468).cwiseAbs().maxCoeff();
    CHECK(ratio >= 0.95);
    CHECK(ratio <= 1.05);

    const auto d = detrend(y).values;
    CHECK(d.mean() == doctest::Approx(0.0).scale(1.0));
    CHECK(d.squaredNorm() / 520 == doctest::Approx(1.0));

    TimeSeries<double> flat;
    flat.values = Eigen::VectorXd::Constant(200, 3.0);
    CHECK_THROWS_AS(detrend(flat), Error);
    CHECK_THROWS_AS(detrend(sinusoid(103, 1.0)), Error);
}

TEST_CASE("gap filling") {
    Eigen::VectorXd v(6);
    v << 1, NAN, NAN, 4, 5, 6;
    const auto f = fill_gaps(v);
    CHECK(f(1) == doctest::Approx(2.0));
    CHECK(f(2) == doctest::Approx(3.0));
    v << 1, NAN, NAN, NAN, 5, 6;
    CHECK_THROWS_AS(fill_gaps(v), Error);
    v << NAN, 2, 3, 4, 5, 6;
    CHECK_THROWS_AS(fill_gaps(v), Error);
}

TEST_CASE("band parsing") {
    const auto b = parse_band("0.8:1.1");
    CHECK(b.lo == 0.8);
    CHECK(b.hi == 1.1);
    CHECK(b.contains(0.8));
    CHECK(b.contains(1.1));
    CHECK_FALSE(b.contains(1.2));
    CHECK_THROWS_AS(parse_band("1.1:0.8"), Error);
    CHECK_THROWS_AS(parse_band("0.8-1.1"), Error);
    CHECK_THROWS_AS(parse_band("0:1"), Error);
}

TEST_CASE("scale grid reaches the circannual band") {
    const auto g = ScaleGrid<double>::standard(1.0 / 52);
    CHECK(g.scale(0) == doctest::Approx(1.0 / 52));
    CHECK(g.scale(g.J) >= 4.0);
    CHECK(g.scale(g.J - 1) < 4.0);
    CHECK(Morlet<double>::fourier_factor() == doctest::Approx(1.0330).epsilon(1e-4));
}

TEST_CASE("impulse response is symmetric in time") {
    TimeSeries<double> y;
    y.values = Eigen::VectorXd::Zero(256);
    y.values(128) = 1.0;
    const auto w = cwt(y);
    const auto p = w.power();
    for (Eigen::Index j = 0; j < w.n_scales(); ++j)
        for (Eigen::Index k = 1; k < 128; ++k)
            CHECK(std::abs(p(j, 128 + k) - p(j, 128 - k)) <= 1e-8 * std::max(1.0, p(j, 128)));
}

TEST_CASE("a pure cycle peaks at its own period") {
    for (double period : {0.5, 1.0, 2.0}) {
        const auto w = cwt(sinusoid(1040, period));
        const Eigen::VectorXd g = w.power().rowwise().mean().matrix();
        const double peak = w.periods()(argmax(g));
        CHECK(std::abs(std::log2(peak / period)) <= w.dj + 1e-9);
    }
}

TEST_CASE("white noise has a flat spectrum over resolved scales") {
    Eigen::VectorXd acc;
    const int reps = 10;
    for (int r = 0; r < reps; ++r) {
        const auto w = cwt(white(2048, 50 + r));
        const Eigen::VectorXd g = w.power().rowwise().mean().matrix();
        acc = r == 0 ? g : (acc + g).eval();
        if (r == reps - 1) {
            acc /= reps;
            for (Eigen::Index j = 0; j < w.n_scales(); ++j) {
                if (w.scales(j) < 3 * w.dt || w.scales(j) > 1.0) continue;
                CHECK(acc(j) >= 0.75);
                CHECK(acc(j) <= 1.25);
            }
        }
    }
}

TEST_CASE("transform is linear and shift covariant") {
    const auto a = white(600, 1), b = white(600, 2);
    TimeSeries<double> mix;
    mix.values = 2.5 * a.values - 0.75 * b.values;
    const auto wa = cwt(a), wb = cwt(b), wm = cwt(mix);
    CHECK((wm.coefficients - (2.5 * wa.coefficients - 0.75 * wb.coefficients)).cwiseAbs().maxCoeff() < 1e-8);

    // A compact bump moved by 100 samples.
    TimeSeries<double> x, shifted;
    x.values = Eigen::VectorXd::Zero(1024);
    shifted.values = Eigen::VectorXd::Zero(1024);
    for (int t = 0; t < 1024; ++t) {
        const double u = (t - 300) / 6.0, v = (t - 400) / 6.0;
        x.values(t) = std::exp(-u * u) * std::cos(t / 3.0);
        shifted.values(t) = std::exp(-v * v) * std::cos((t - 100) / 3.0);
    }
    const auto w1 = cwt(x), w2 = cwt(shifted);
    for (Eigen::Index j = 0; j < w1.n_scales(); ++j) {
        if (w1.scales(j) > 0.5) continue;
        for (Eigen::Index t = 150; t < 700; ++t)
            CHECK(std::abs(w1.coefficients(j, t) - w2.coefficients(j, t + 100)) < 1e-6);
    }
}

TEST_CASE("energy is preserved approximately") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto y = standardize(white(1024, 70 + seed));
        const double v = wavelet_variance(cwt(y, ScaleGrid<double>::standard(y.dt, 16.0), Band{0.8, 1.1}));
        CHECK(v == doctest::Approx(1.0).epsilon(0.10));
    }
    TimeSeries<double> flat;
    flat.values = Eigen::VectorXd::Constant(300, 7.0);
    CHECK(cwt(flat).power().maxCoeff() < 1e-20);
}

TEST_CASE("full-band reconstruction returns the input") {
    const auto y = standardize(white(1024, 9));
    const auto w = cwt(y, ScaleGrid<double>::standard(y.dt, 16.0), Band{0.8, 1.1});
    const auto back = reconstruct_band(w, Band::all());
    const Eigen::VectorXd mid = y.values.segment(100, 824), rec = back.values.segment(100, 824);
    CHECK(correlation(mid, rec) >= 0.98);
}

TEST_CASE("circannual band reconstruction") {
    const auto y = gen_seasonal(1.0, 1.0, 0.5, 520, 3);
    const auto d = detrend(y);
    const auto rec = reconstruct_band(cwt(d), Band{0.8, 1.1});
    const auto truth = sinusoid(520, 1.0);
    CHECK(correlation(rec.values.segment(52, 416), truth.values.segment(52, 416)) >= 0.98);

    double ratio = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto n = detrend(white(520, 400 + s));
        const auto r = reconstruct_band(cwt(n), Band{0.8, 1.1});
        ratio += (r.values.array() - r.values.mean()).square().mean() / 10;
    }
    CHECK(ratio <= 0.2);
}

TEST_CASE("red-noise null") {
    // Without detrending the lag-1 coefficient is the Pearson one and the
    // spectrum of white noise is flat at sigma^2.
    const auto y = gen_ar1(0.6, 20000, 5);
    const auto plain = fit_red_noise(y, 0);
    CHECK(plain.lag1 == doctest::Approx(0.6).epsilon(0.03));
    RedNoiseNull<double> flat;
    for (double s : {0.05, 0.3, 1.0}) CHECK(flat.expected_power(s, 1.0 / 52) == doctest::Approx(1.0).epsilon(1e-3));

    // The filtered null matches the observed lag-1 of the detrended series.
    const auto d = detrend(y);
    const auto null = fit_red_noise(d);
    CHECK(null.filtered_lag1(null.lag1) == doctest::Approx(null.observed_lag1).epsilon(1e-6));
    const auto noise = fit_red_noise(detrend(white(520, 6)));
    CHECK(noise.lag1 >= 0.0);
    CHECK(noise.lag1 < 0.2);
}

TEST_CASE("global spectrum flags the seasonal peak") {
    const auto a = analyze_series(gen_seasonal(1.0, 1.0, 1.0, 520, 8));
    CHECK(a.global.significant_in(Band{0.8, 1.1}));
    const double peak = a.global.periods(argmax(a.global.power));
    CHECK(peak >= 0.8);
    CHECK(peak <= 1.1);
}

TEST_CASE("band power significance") {
    const auto stationary = analyze_series(gen_seasonal(1.0, 1.0, 1.0, 520, 10));
    CHECK(stationary.band.significant_fraction() >= 0.9);
    CHECK(stationary.band.scale_indices.size() >= 3);
    CHECK((stationary.band.significant <= stationary.band.coi_valid).all());

    // Cycle only in the first half.
    auto y = white(520, 11);
    const auto s = sinusoid(520, 1.0);
    y.values.head(260) += 1.5 * s.values.head(260);
    const auto half = analyze_series(y);
    auto fraction = [&](Eigen::Index lo, Eigen::Index hi) {
        double sig = 0, valid = 0;
        for (Eigen::Index t = lo; t < hi; ++t) {
            if (!half.band.coi_valid(t)) continue;
            ++valid;
            sig += half.band.significant(t);
        }
        return sig / valid;
    };
    CHECK(fraction(0, 260) >= 0.7);
    CHECK(fraction(260, 520) <= 0.3);

    double noise = 0;
    for (std::uint64_t k = 0; k < 20; ++k) noise += analyze_series(white(520, 500 + k)).band.significant_fraction() / 20;
    CHECK(noise <= 0.1);
}

TEST_CASE("composed power") {
    const int regions = 6;
    RegionSeriesSet same;
    const auto base = gen_seasonal(1.0, 1.0, 0.4, 520, 12).values;
    same.counts.resize(520, regions);
    for (int i = 0; i < regions; ++i) {
        same.region_ids.push_back(i);
        same.counts.col(i) = base;
    }
    const auto c = composed_power(same);
    CHECK(c.regions_valid == regions);
    for (Eigen::Index t = 0; t < c.c_b.size(); ++t) {
        if (c.coi_valid(t)) CHECK(c.c_b(t) == regions);
        else CHECK(c.c_b(t) == 0);
    }
    CHECK(c.coi_interior_cv() == 0.0);

    RegionSeriesSet noise;
    const int r = 20;
    noise.counts.resize(520, r);
    for (int i = 0; i < r; ++i) {
        noise.region_ids.push_back(100 + i);
        noise.counts.col(i) = white(520, 900 + static_cast<std::uint64_t>(i)).values;
    }
    const auto n = composed_power(noise, Band{}, {}, 4);
    CHECK((n.c_b.array() == n.masks.cast<int>().colwise().sum().transpose().array()).all());
    const auto low = (n.c_b.array().cast<double>() <= 0.15 * r).count();
    CHECK(static_cast<double>(low) >= 0.9 * 520);
    const auto single = composed_power(noise, Band{}, {}, 1);
    CHECK((single.c_b.array() == n.c_b.array()).all());
}

TEST_CASE("rejected regions contribute nothing") {
    RegionSeriesSet set;
    set.counts.resize(520, 3);
    for (int i = 0; i < 3; ++i) {
        set.region_ids.push_back(i);
        set.counts.col(i) = gen_seasonal(1.0, 1.0, 0.5, 520, 20 + static_cast<std::uint64_t>(i)).values;
    }
    set.counts.col(1).setConstant(4.0);
    const auto c = composed_power(set);
    CHECK(c.regions_valid == 2);
    CHECK_FALSE(c.region_valid[1]);
    CHECK_FALSE(c.region_error[1].empty());
    CHECK_FALSE(c.masks.row(1).any());
    set.counts.col(2).setConstant(1.0);
    CHECK_THROWS_AS(composed_power(set), Error);
}

TEST_CASE("significant runs") {
    Eigen::Array<bool, Eigen::Dynamic, 1> m(5);
    m << true, true, false, true, true;
    const auto runs = mask_runs(m, 7);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].start == 0);
    CHECK(runs[0].length == 2);
    CHECK(runs[1].start == 3);
    CHECK(runs[1].length == 2);
    CHECK(runs[1].region_id == 7);
    CHECK(median_duration(runs) == 2.0);

    m.setConstant(true);
    const auto all = mask_runs(m);
    REQUIRE(all.size() == 1);
    CHECK(all[0].length == 5);
    m.setConstant(false);
    CHECK(mask_runs(m).empty());
    CHECK(median_duration({}) == 0.0);
    CHECK(median_duration({{0, 0, 1}, {0, 5, 4}}) == 2.5);
}

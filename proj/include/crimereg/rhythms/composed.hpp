#pragma once

#include "crimereg/parallel.hpp"
#include "crimereg/rhythms/significance.hpp"
#include "crimereg/series.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace crimereg {

/// Everything the rhythm analysis derives from one raw weekly series.
template <typename Scalar = double>
struct SeriesAnalysis {
    TimeSeries<Scalar> detrended;
    WaveletField<Scalar> field;
    GlobalSpectrum<Scalar> global;
    BandPower<Scalar> band;
};

/// Gap filling, detrending, transform, global spectrum and band power.
template <typename Scalar>
SeriesAnalysis<Scalar> analyze_series(const TimeSeries<Scalar>& raw, const Band& band = {},
                                      const SignificanceOptions& opts = {}) {
    TimeSeries<Scalar> filled = raw;
    filled.values = fill_gaps(raw.values);
    SeriesAnalysis<Scalar> a;
    a.detrended = opts.detrend_window > 1 ? detrend(filled, opts.detrend_window) : standardize(filled);
    a.field = cwt(a.detrended, ScaleGrid<Scalar>::standard(a.detrended.dt), band);
    a.global = global_spectrum(a.field, a.detrended, opts);
    a.band = band_power(a.field, a.detrended, band, opts);
    return a;
}

/// C^b(t): how many regions show a significant band at each week.
struct ComposedPower {
    using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

    Eigen::VectorXi c_b;               // per week
    Mask masks;                        // regions x weeks; all false for rejected regions
    Eigen::Array<bool, Eigen::Dynamic, 1> coi_valid; // per week
    std::vector<int> region_ids;
    std::vector<bool> region_valid;
    std::vector<std::string> region_error; // empty when valid
    int regions_valid = 0;

    /// Coefficient of variation of c_b over COI-valid weeks.
    double coi_interior_cv() const {
        std::vector<double> v;
        for (Eigen::Index t = 0; t < c_b.size(); ++t) {
            if (coi_valid(t)) v.push_back(static_cast<double>(c_b(t)));
        }
        if (v.empty()) return 0.0;
        const auto n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        if (mean == 0.0) return 0.0;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::sqrt(var / n) / mean;
    }
};

/// Runs the band analysis on every region series independently. A region
/// whose series cannot be analysed (gap longer than two weeks, zero variance)
/// is recorded as rejected and contributes nothing. Requires at least two
/// analysable regions.
inline ComposedPower composed_power(const RegionSeriesSet& set, const Band& band = {},
                                    const SignificanceOptions& opts = {}, int workers = 1) {
    const Eigen::Index regions = set.regions(), weeks = set.weeks();
    ComposedPower out;
    out.masks = ComposedPower::Mask::Constant(regions, weeks, false);
    out.region_ids = set.region_ids;
    out.region_valid.assign(static_cast<std::size_t>(regions), false);
    out.region_error.assign(static_cast<std::size_t>(regions), std::string{});
    std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> coi(static_cast<std::size_t>(regions));
    std::vector<char> valid(static_cast<std::size_t>(regions), 0); // vector<bool> is not thread-safe per element

    parallel_for(static_cast<std::size_t>(regions), workers, [&](std::size_t i) {
        TimeSeries<double> y;
        y.values = set.counts.col(static_cast<Eigen::Index>(i));
        if (!set.week_starts.empty()) y.t0 = set.week_starts.front();
        try {
            const auto a = analyze_series(y, band, opts);
            out.masks.row(static_cast<Eigen::Index>(i)) = a.band.significant.transpose();
            coi[i] = a.band.coi_valid;
            valid[i] = 1;
        } catch (const Error& e) {
            out.region_error[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < valid.size(); ++i) out.region_valid[i] = valid[i] != 0;
    out.regions_valid = static_cast<int>(std::count(valid.begin(), valid.end(), 1));
    if (out.regions_valid < 2)
        throw Error("rhythms", "composed power needs at least 2 analysable regions, got " +
                                   std::to_string(out.regions_valid));
    // The cone of influence depends only on the series length and the band.
    for (std::size_t i = 0; i < coi.size(); ++i) {
        if (out.region_valid[i]) {
            out.coi_valid = coi[i];
            break;
        }
    }
    out.c_b = out.masks.cast<int>().colwise().sum().transpose();
    return out;
}

/// A maximal run of consecutive significant weeks.
struct SignificantRun {
    int region_id = 0;
    Eigen::Index start = 0;
    Eigen::Index length = 0;
};

/// Maximal runs of true values in one mask.
inline std::vector<SignificantRun> mask_runs(const Eigen::Ref<const Eigen::Array<bool, Eigen::Dynamic, 1>>& mask,
                                             int region_id = 0) {
    std::vector<SignificantRun> runs;
    for (Eigen::Index t = 0; t < mask.size();) {
        if (!mask(t)) {
            ++t;
            continue;
        }
        Eigen::Index u = t;
        while (u < mask.size() && mask(u)) ++u;
        runs.push_back({region_id, t, u - t});
        t = u;
    }
    return runs;
}

/// Pooled runs over all regions, region by region. COI-invalid weeks are
/// already false in the masks, so they terminate runs.
inline std::vector<SignificantRun> significant_durations(const ComposedPower& composed) {
    std::vector<SignificantRun> runs;
    for (Eigen::Index i = 0; i < composed.masks.rows(); ++i) {
        const Eigen::Array<bool, Eigen::Dynamic, 1> row = composed.masks.row(i).transpose();
        auto r = mask_runs(row, composed.region_ids[static_cast<std::size_t>(i)]);
        runs.insert(runs.end(), r.begin(), r.end());
    }
    return runs;
}

/// Median of the run lengths (mean of the middle pair for even counts); 0 if empty.
inline double median_duration(const std::vector<SignificantRun>& runs) {
    if (runs.empty()) return 0.0;
    std::vector<Eigen::Index> len;
    for (const auto& r : runs) len.push_back(r.length);
    std::sort(len.begin(), len.end());
    const auto n = len.size();
    return n % 2 ? static_cast<double>(len[n / 2]) : 0.5 * static_cast<double>(len[n / 2 - 1] + len[n / 2]);
}

} // namespace crimereg

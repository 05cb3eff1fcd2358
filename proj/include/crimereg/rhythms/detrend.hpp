#pragma once

#include "crimereg/rhythms/time_series.hpp"

#include <algorithm>
#include <cmath>

namespace crimereg {

inline constexpr int kDetrendWindow = 53;
inline constexpr Eigen::Index kMinCircannualLength = 104;

/// Subtracts a centred moving average of `window` samples. Near the ends the
/// window shrinks symmetrically so it stays centred.
template <typename Scalar>
TimeSeries<Scalar> remove_trend(const TimeSeries<Scalar>& y, int window = kDetrendWindow) {
    const Eigen::Index n = y.size();
    const Eigen::Index half = window / 2;
    TimeSeries<Scalar> out = y;
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index h = std::min({half, t, n - 1 - t});
        out.values(t) = y.values(t) - y.values.segment(t - h, 2 * h + 1).mean();
    }
    return out;
}

/// Zero mean, unit (population) variance.
template <typename Scalar>
TimeSeries<Scalar> standardize(const TimeSeries<Scalar>& y) {
    TimeSeries<Scalar> out = y;
    const Scalar mean = y.values.mean();
    out.values.array() -= mean;
    const Scalar sd = std::sqrt(out.values.squaredNorm() / Scalar(y.size()));
    const Scalar scale = std::max(Scalar(1), y.values.cwiseAbs().maxCoeff());
    if (!(sd > Scalar(1e-12) * scale)) throw Error("rhythms", "zero variance after trend removal");
    out.values /= sd;
    return out;
}

/// Long-term trend removal followed by standardisation. Requires at least
/// two years of weekly data.
template <typename Scalar>
TimeSeries<Scalar> detrend(const TimeSeries<Scalar>& y, int window = kDetrendWindow) {
    if (y.size() < kMinCircannualLength)
        throw Error("rhythms", "series of " + std::to_string(y.size()) + " samples is shorter than 104");
    return standardize(remove_trend(y, window));
}

} // namespace crimereg

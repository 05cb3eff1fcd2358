#pragma once

#include "crimereg/error.hpp"
#include "crimereg/time.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace crimereg {

inline constexpr double kWeeksPerYear = 52.0;

/// Uniformly sampled series; `dt` is the step in years (weekly: 1/52).
template <typename Scalar = double>
struct TimeSeries {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector values;
    Scalar dt = Scalar(1) / Scalar(kWeeksPerYear);
    Date t0{};

    Eigen::Index size() const { return values.size(); }
};

/// Period band in years, closed on both ends. The default is the circannual
/// band.
struct Band {
    double lo = 0.8;
    double hi = 1.1;

    static Band all() { return {0.0, std::numeric_limits<double>::infinity()}; }
    bool contains(double period) const { return period >= lo && period <= hi; }
};

/// Parses `lo:hi`.
inline Band parse_band(std::string_view text) {
    const auto colon = text.find(':');
    Band b;
    auto num = [](std::string_view s, double& out) {
        auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc{} && res.ptr == s.data() + s.size();
    };
    if (colon == std::string_view::npos || !num(text.substr(0, colon), b.lo) || !num(text.substr(colon + 1), b.hi) ||
        !(b.lo > 0.0) || !(b.hi > b.lo))
        throw Error("rhythms", "band must look like lo:hi with 0 < lo < hi, got '" + std::string(text) + "'");
    return b;
}

/// Linearly interpolates interior runs of at most `max_gap` NaNs. Longer
/// runs, or NaNs touching either end, reject the series.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> fill_gaps(const Eigen::MatrixBase<Derived>& values,
                                                                    int max_gap = 2) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = values;
    const Eigen::Index n = out.size();
    for (Eigen::Index i = 0; i < n;) {
        if (!std::isnan(out(i))) {
            ++i;
            continue;
        }
        Eigen::Index j = i;
        while (j < n && std::isnan(out(j))) ++j;
        if (i == 0 || j == n) throw Error("rhythms", "missing values at the series edge");
        if (j - i > max_gap)
            throw Error("rhythms", "gap of " + std::to_string(j - i) + " missing weeks exceeds " + std::to_string(max_gap));
        const Scalar a = out(i - 1), b = out(j);
        for (Eigen::Index k = i; k < j; ++k) {
            const Scalar t = Scalar(k - i + 1) / Scalar(j - i + 1);
            out(k) = a + t * (b - a);
        }
        i = j;
    }
    return out;
}

} // namespace crimereg

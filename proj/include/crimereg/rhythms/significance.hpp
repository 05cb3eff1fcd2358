#pragma once

#include "crimereg/rhythms/detrend.hpp"
#include "crimereg/rhythms/wavelet.hpp"
#include "crimereg/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace crimereg {

struct SignificanceOptions {
    double alpha_level = 0.05;
    /// Moving-average window that was removed from the series before the
    /// transform; 0 when the input was only standardised.
    int detrend_window = kDetrendWindow;
};

/// AR(1) red-noise null for a series that went through detrend().
///
/// The null process is AR(1) with coefficient `lag1`, passed through the
/// same moving-average removal as the data, so its normalised spectrum is
///
///   S(f) = P(f; a) G(f) / Z,   P(f; a) = (1 - a^2) / (1 + a^2 - 2a cos 2 pi f),
///   G(f) = (1 - sin(L pi f) / (L sin pi f))^2,
///
/// with Z making S integrate to one. `lag1` is chosen so that the filtered
/// process has the observed lag-1 autocorrelation (floored at zero); with no
/// detrending this is the Pearson lag-1 coefficient itself.
template <typename Scalar = double>
struct RedNoiseNull {
    Scalar lag1 = 0;
    Scalar observed_lag1 = 0;
    Scalar variance = 1;
    int detrend_window = 0;

    /// Normalised null spectrum at frequency f in cycles per sample, f in (0, 1/2].
    Scalar spectrum(Scalar f) const { return raw(f, lag1) / normalisation(lag1); }

    /// Expected |W(s, n)|^2 of the null process at scale s:
    ///   sigma^2 * integral_0^{1/2} S(f) |psi_hat(s 2 pi f / dt)|^2 df,
    /// integrated in the wavelet's own Gaussian coordinate.
    Scalar expected_power(Scalar scale, Scalar dt) const {
        constexpr Scalar omega0 = Morlet<Scalar>::omega0;
        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar u_lo = std::max(-omega0, Scalar(-8));
        const Scalar u_hi = std::min(pi * scale / dt - omega0, Scalar(8));
        if (!(u_hi > u_lo)) return Scalar(0);
        const Scalar z = normalisation(lag1);
        // Composite Simpson on an even number of panels.
        constexpr int panels = 800;
        const Scalar h = (u_hi - u_lo) / Scalar(panels);
        Scalar acc = 0;
        for (int i = 0; i <= panels; ++i) {
            const Scalar u = u_lo + h * Scalar(i);
            const Scalar f = (u + omega0) * dt / (Scalar(2) * pi * scale);
            const Scalar weight = (i == 0 || i == panels) ? Scalar(1) : (i % 2 ? Scalar(4) : Scalar(2));
            acc += weight * raw(f, lag1) * std::exp(-u * u);
        }
        return variance * acc * h / Scalar(3) / z / std::sqrt(pi);
    }

    /// Lag-1 autocorrelation of the filtered AR(1) process with coefficient a.
    Scalar filtered_lag1(Scalar a) const {
        Scalar num = 0, den = 0;
        for (int k = 0; k < kGrid; ++k) {
            const Scalar f = (Scalar(k) + Scalar(0.5)) / Scalar(2 * kGrid);
            const Scalar s = raw(f, a);
            num += s * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * f);
            den += s;
        }
        return num / den;
    }

    static constexpr int kGrid = 4096;

    Scalar gain(Scalar f) const {
        if (detrend_window <= 1) return Scalar(1);
        const Scalar l = Scalar(detrend_window);
        const Scalar pi = std::numbers::pi_v<Scalar>;
        const Scalar sp = std::sin(pi * f);
        const Scalar h = std::abs(sp) < Scalar(1e-12) ? Scalar(1) : std::sin(l * pi * f) / (l * sp);
        return (Scalar(1) - h) * (Scalar(1) - h);
    }

    Scalar raw(Scalar f, Scalar a) const {
        const Scalar p = (Scalar(1) - a * a) / (Scalar(1) + a * a - Scalar(2) * a * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * f));
        return p * gain(f);
    }

    /// Z = 2 * integral_0^{1/2} P G df (midpoint rule).
    Scalar normalisation(Scalar a) const {
        if (detrend_window <= 1) return Scalar(1);
        Scalar acc = 0;
        for (int k = 0; k < kGrid; ++k) acc += raw((Scalar(k) + Scalar(0.5)) / Scalar(2 * kGrid), a);
        return acc / Scalar(kGrid);
    }
};

/// Pearson lag-1 autocorrelation.
template <typename Scalar>
Scalar lag1_autocorrelation(const TimeSeries<Scalar>& y) {
    const Eigen::Index n = y.size();
    if (n < 3) return Scalar(0);
    const auto a = y.values.head(n - 1).array();
    const auto b = y.values.tail(n - 1).array();
    const Scalar ma = a.mean(), mb = b.mean();
    const Scalar sab = ((a - ma) * (b - mb)).sum();
    const Scalar saa = (a - ma).square().sum(), sbb = (b - mb).square().sum();
    if (!(saa > 0) || !(sbb > 0)) return Scalar(0);
    return sab / std::sqrt(saa * sbb);
}

template <typename Scalar>
RedNoiseNull<Scalar> fit_red_noise(const TimeSeries<Scalar>& y, int detrend_window = kDetrendWindow) {
    RedNoiseNull<Scalar> null;
    null.detrend_window = detrend_window;
    const Eigen::Index n = y.size();
    null.variance = n > 0 ? (y.values.array() - y.values.mean()).square().sum() / Scalar(n) : Scalar(0);
    null.observed_lag1 = lag1_autocorrelation(y);
    const Scalar r = null.observed_lag1;
    if (detrend_window <= 1) {
        null.lag1 = std::max(r, Scalar(0));
        return null;
    }
    if (r <= null.filtered_lag1(Scalar(0))) return null;
    Scalar lo = 0, hi = Scalar(0.999);
    if (r >= null.filtered_lag1(hi)) {
        null.lag1 = hi;
        return null;
    }
    for (int it = 0; it < 60; ++it) {
        const Scalar mid = Scalar(0.5) * (lo + hi);
        if (null.filtered_lag1(mid) < r) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    null.lag1 = Scalar(0.5) * (lo + hi);
    return null;
}

template <typename Scalar = double>
struct GlobalSpectrum {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector scales;
    Vector periods;
    Vector power;        // mean over time of |W|^2
    Vector significance; // (1 - alpha) threshold of the red-noise null
    std::vector<Eigen::Index> peak_scales; // power > significance
    RedNoiseNull<Scalar> null;

    bool significant_in(const Band& band) const {
        for (auto j : peak_scales) {
            if (band.contains(static_cast<double>(periods(j)))) return true;
        }
        return false;
    }
};

/// Time-averaged power with a chi-square threshold whose degrees of freedom
/// are 2 sqrt(1 + (n_a dt / (gamma s))^2), n_a = N - s/dt.
template <typename Scalar>
GlobalSpectrum<Scalar> global_spectrum(const WaveletField<Scalar>& w, const TimeSeries<Scalar>& y,
                                       const SignificanceOptions& opts = {}) {
    GlobalSpectrum<Scalar> g;
    g.null = fit_red_noise(y, opts.detrend_window);
    g.scales = w.scales;
    g.periods = w.periods();
    g.power = w.power().rowwise().mean().matrix();
    g.significance.resize(w.n_scales());
    const Scalar n = Scalar(w.n_times());
    for (Eigen::Index j = 0; j < w.n_scales(); ++j) {
        const Scalar s = w.scales(j);
        const Scalar na = std::max(Scalar(1), n - s / w.dt);
        const Scalar ratio = na * w.dt / (Morlet<Scalar>::gamma * s);
        const Scalar dof = Scalar(2) * std::sqrt(Scalar(1) + ratio * ratio);
        const Scalar q = static_cast<Scalar>(special::chi2_quantile(1.0 - opts.alpha_level, static_cast<double>(dof)));
        g.significance(j) = g.null.expected_power(s, w.dt) * q / dof;
        if (g.power(j) > g.significance(j)) g.peak_scales.push_back(j);
    }
    return g;
}

template <typename Scalar = double>
struct BandPower {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

    Band band;
    Vector series;     // scale-averaged power per time step
    Scalar threshold = 0;
    Scalar dof = 0;
    Mask significant;  // series > threshold and inside the cone of influence
    Mask coi_valid;
    std::vector<Eigen::Index> scale_indices;
    RedNoiseNull<Scalar> null;

    /// Fraction of COI-valid steps that are significant.
    double significant_fraction() const {
        const auto valid = coi_valid.count();
        return valid ? static_cast<double>(significant.count()) / static_cast<double>(valid) : 0.0;
    }
};

/// Scale-averaged power dj dt / C_delta * sum_j |W(s_j, n)|^2 / s_j over the
/// band, tested against the red-noise null with
/// dof = 2 n_a S_avg / S_mid sqrt(1 + (n_a dj / dj0)^2).
template <typename Scalar>
BandPower<Scalar> band_power(const WaveletField<Scalar>& w, const TimeSeries<Scalar>& y, const Band& band,
                             const SignificanceOptions& opts = {}) {
    BandPower<Scalar> b;
    b.band = band;
    b.scale_indices = w.band_indices(band);
    if (b.scale_indices.empty()) throw Error("rhythms", "band selects no scales");
    b.null = fit_red_noise(y, opts.detrend_window);

    const Scalar norm = w.dj * w.dt / Morlet<Scalar>::reconstruction;
    const auto p = w.power();
    b.series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(w.n_times());
    Scalar inv_scale_sum = 0, null_sum = 0;
    for (auto j : b.scale_indices) {
        const Scalar s = w.scales(j);
        b.series += p.row(j).matrix().transpose() / s;
        inv_scale_sum += Scalar(1) / s;
        null_sum += b.null.expected_power(s, w.dt) / s;
    }
    b.series *= norm;

    const Scalar na = Scalar(b.scale_indices.size());
    const Scalar s_avg = Scalar(1) / inv_scale_sum;
    const Scalar s_mid = w.scales(0) * std::exp2(Scalar(0.5) * Scalar(b.scale_indices.front() + b.scale_indices.back()) * w.dj);
    const Scalar r = na * w.dj / Morlet<Scalar>::dj0;
    b.dof = Scalar(2) * na * s_avg / s_mid * std::sqrt(Scalar(1) + r * r);
    const Scalar q = static_cast<Scalar>(special::chi2_quantile(1.0 - opts.alpha_level, static_cast<double>(b.dof)));
    b.threshold = norm * null_sum * q / b.dof;

    const Scalar top = w.scales(b.scale_indices.back());
    b.coi_valid = (w.coi.array() >= top);
    b.significant = b.coi_valid && (b.series.array() > b.threshold);
    return b;
}

} // namespace crimereg

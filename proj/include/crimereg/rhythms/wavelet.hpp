#pragma once

#include "crimereg/rhythms/time_series.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace crimereg {

/// Morlet mother wavelet constants for omega0 = 6.
template <typename Scalar = double>
struct Morlet {
    static constexpr Scalar omega0 = Scalar(6);
    /// Empirical reconstruction factor C_delta.
    static constexpr Scalar reconstruction = Scalar(0.776);
    /// Decorrelation factor for time averaging.
    static constexpr Scalar gamma = Scalar(2.32);
    /// Decorrelation factor for scale averaging.
    static constexpr Scalar dj0 = Scalar(0.60);

    static Scalar psi0_at_zero() { return std::pow(std::numbers::pi_v<Scalar>, Scalar(-0.25)); }

    /// Fourier period = factor * scale.
    static Scalar fourier_factor() {
        return Scalar(4) * std::numbers::pi_v<Scalar> / (omega0 + std::sqrt(Scalar(2) + omega0 * omega0));
    }

    /// Normalised frequency-domain wavelet sqrt(2 pi s / dt) psi_hat(s w),
    /// zero for non-positive frequencies.
    static Scalar frequency_response(Scalar scale, Scalar omega, Scalar dt) {
        if (omega <= Scalar(0)) return Scalar(0);
        const Scalar d = scale * omega - omega0;
        return std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * scale / dt) * psi0_at_zero() *
               std::exp(Scalar(-0.5) * d * d);
    }
};

/// Scales s_j = s0 * 2^(j dj) for j = 0..J.
template <typename Scalar = double>
struct ScaleGrid {
    Scalar s0;
    Scalar dj;
    int J;

    /// s0 = dt, dj = 0.1 and J large enough for the last scale to reach
    /// `max_scale` years.
    static ScaleGrid standard(Scalar dt, Scalar max_scale = Scalar(4)) {
        const Scalar dj = Scalar(0.1);
        const int J = static_cast<int>(std::ceil(std::log2(max_scale / dt) / dj - Scalar(1e-9)));
        return {dt, dj, J};
    }

    Scalar scale(int j) const { return s0 * std::exp2(Scalar(j) * dj); }
};

/// Continuous wavelet transform of one series.
///
/// `coefficients(j, n)` is W(s_j, n). `coi(n)` is the largest scale whose
/// e-folding time sqrt(2) s still fits between sample n and the nearest
/// series end; coefficients at larger scales are edge-affected.
template <typename Scalar = double>
struct WaveletField {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

    ComplexMatrix coefficients;
    Vector scales;
    Vector coi;
    Scalar omega0 = Morlet<Scalar>::omega0;
    Scalar dt = Scalar(1) / Scalar(kWeeksPerYear);
    Scalar dj = Scalar(0.1);
    Eigen::Index padded_length = 0;

    Eigen::Index n_scales() const { return coefficients.rows(); }
    Eigen::Index n_times() const { return coefficients.cols(); }

    Vector periods() const { return scales * Morlet<Scalar>::fourier_factor(); }

    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> power() const { return coefficients.cwiseAbs2().array(); }

    bool inside_coi(Eigen::Index j, Eigen::Index n) const { return scales(j) <= coi(n); }

    /// Indices j whose Fourier period lies in the band, ascending.
    std::vector<Eigen::Index> band_indices(const Band& band) const {
        std::vector<Eigen::Index> out;
        const Scalar f = Morlet<Scalar>::fourier_factor();
        for (Eigen::Index j = 0; j < scales.size(); ++j) {
            if (band.contains(static_cast<double>(scales(j) * f))) out.push_back(j);
        }
        return out;
    }
};

inline Eigen::Index next_power_of_two(Eigen::Index n) {
    Eigen::Index m = 1;
    while (m < n) m <<= 1;
    return m;
}

/// Morlet CWT evaluated through the FFT: the mean-removed series is
/// zero-padded to the next power of two, multiplied by the normalised
/// wavelet response at each scale and transformed back. Throws if the scale
/// range does not span `required`.
template <typename Scalar>
WaveletField<Scalar> cwt(const TimeSeries<Scalar>& y, const ScaleGrid<Scalar>& grid, const Band& required = Band{}) {
    using Complex = std::complex<Scalar>;
    using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
    const Eigen::Index n = y.size();
    if (n < 2) throw Error("rhythms", "cwt needs at least 2 samples");
    if (!(grid.s0 > 0) || !(grid.dj > 0) || grid.J < 0) throw Error("rhythms", "invalid scale grid");
    if (!y.values.allFinite()) throw Error("rhythms", "cwt input contains non-finite values");

    WaveletField<Scalar> w;
    w.dt = y.dt;
    w.dj = grid.dj;
    w.scales.resize(grid.J + 1);
    for (int j = 0; j <= grid.J; ++j) w.scales(j) = grid.scale(j);

    const Scalar factor = Morlet<Scalar>::fourier_factor();
    if (static_cast<double>(w.scales(0) * factor) > required.lo ||
        static_cast<double>(w.scales(grid.J) * factor) < std::min(required.hi, 1e300))
        throw Error("rhythms", "scale range does not cover the required period band");

    const Eigen::Index m = next_power_of_two(n);
    w.padded_length = m;
    CVector x = CVector::Zero(m);
    const Scalar mean = y.values.mean();
    for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(y.values(i) - mean, 0);

    Eigen::FFT<Scalar> fft;
    CVector spectrum(m);
    fft.fwd(spectrum, x);

    std::vector<Scalar> omega(static_cast<std::size_t>(m));
    const Scalar base = Scalar(2) * std::numbers::pi_v<Scalar> / (Scalar(m) * y.dt);
    for (Eigen::Index k = 0; k < m; ++k) {
        omega[static_cast<std::size_t>(k)] = k <= m / 2 ? base * Scalar(k) : -base * Scalar(m - k);
    }

    w.coefficients.resize(grid.J + 1, n);
    CVector product(m), back(m);
    for (int j = 0; j <= grid.J; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            product(k) = spectrum(k) * Morlet<Scalar>::frequency_response(w.scales(j), omega[static_cast<std::size_t>(k)], y.dt);
        }
        fft.inv(back, product);
        w.coefficients.row(j) = back.head(n).transpose();
    }

    w.coi.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w.coi(i) = y.dt * Scalar(std::min(i, n - 1 - i)) / std::numbers::sqrt2_v<Scalar>;
    }
    return w;
}

template <typename Scalar>
WaveletField<Scalar> cwt(const TimeSeries<Scalar>& y) {
    return cwt(y, ScaleGrid<Scalar>::standard(y.dt));
}

/// Inverse transform restricted to the scales whose period lies in `band`:
///
///   x_n = dj sqrt(dt) / (C_delta psi0(0)) * sum_j Re W(s_j, n) / sqrt(s_j)
///
/// With Band::all() this reconstructs the (mean-removed) input.
template <typename Scalar>
TimeSeries<Scalar> reconstruct_band(const WaveletField<Scalar>& w, const Band& band, Date t0 = {}) {
    const auto idx = w.band_indices(band);
    if (idx.empty()) throw Error("rhythms", "band selects no scales");
    TimeSeries<Scalar> out;
    out.dt = w.dt;
    out.t0 = t0;
    out.values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(w.n_times());
    for (auto j : idx) out.values += w.coefficients.row(j).real().transpose() / std::sqrt(w.scales(j));
    out.values *= w.dj * std::sqrt(w.dt) / (Morlet<Scalar>::reconstruction * Morlet<Scalar>::psi0_at_zero());
    return out;
}

/// Total variance implied by the transform,
/// dj dt / (C_delta N) * sum_{j,n} |W(s_j, n)|^2 / s_j.
template <typename Scalar>
Scalar wavelet_variance(const WaveletField<Scalar>& w) {
    const auto p = w.power();
    Scalar total = 0;
    for (Eigen::Index j = 0; j < w.n_scales(); ++j) total += p.row(j).sum() / w.scales(j);
    return w.dj * w.dt * total / (Morlet<Scalar>::reconstruction * Scalar(w.n_times()));
}

} // namespace crimereg

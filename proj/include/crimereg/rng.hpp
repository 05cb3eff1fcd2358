#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace crimereg {

/// Seeded generator with fully specified derived distributions.
///
/// The standard library leaves `std::normal_distribution` and friends
/// implementation-defined, so every draw here is built from raw
/// `mt19937_64` output by a documented transform. Any implementation of
/// the same transforms on the same seed reproduces the same stream.
class Rng {
public:
    static constexpr const char* algorithm =
        "mt19937_64; uniform=(u64>>11)*2^-53; normal=Box-Muller(cos branch then sin branch); "
        "poisson=Knuth product in chunks of lambda<=16";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n) by rejection of the biased top range.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    std::int64_t poisson(double lambda) {
        std::int64_t total = 0;
        while (lambda > 0.0) {
            const double chunk = lambda > 16.0 ? 16.0 : lambda;
            lambda -= chunk;
            const double limit = std::exp(-chunk);
            double p = uniform();
            while (p > limit) {
                ++total;
                p *= uniform();
            }
        }
        return total;
    }

    /// Fisher-Yates from the back.
    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace crimereg

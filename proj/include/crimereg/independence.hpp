#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace crimereg {

/// Paired per-city observations, e.g. population size against the average
/// power-law exponent.
struct PairedSample {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    std::vector<std::string> labels;

    Eigen::Index size() const { return x.size(); }
};

/// Hoeffding's D on the scale where perfect monotone dependence without ties
/// gives 1 and the range is [-0.5, 1]:
///
///   D = 30 [(n-2)(n-3) D1 + D2 - 2(n-2) D3] / [n(n-1)(n-2)(n-3)(n-4)]
///
/// with R, S the marginal midranks, Q the bivariate ranks (ties on a
/// coordinate count 1/2, on both 1/4), D1 = sum (Q-1)(Q-2),
/// D2 = sum (R-1)(R-2)(S-1)(S-2), D3 = sum (R-2)(S-2)(Q-1).
/// Requires n >= 5.
double hoeffding_d(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);
double hoeffding_d(const PairedSample& s);

struct HoeffdingTest {
    double d = 0.0;
    double p_value = 1.0;
    Eigen::Index n = 0;
    int n_perm = 0;
    bool reject = false; // at the given significance level
};

/// Permutation test: p = (1 + #{D_perm >= D_obs}) / (1 + n_perm), each
/// permutation of y drawn with Rng(seed + index). A constant x or y yields
/// p = 1. Requires n_perm >= 999.
HoeffdingTest hoeffding_test(const PairedSample& s, int n_perm, std::uint64_t seed = 0,
                             double significance = 0.05, int workers = 1);

/// CSV with columns `label,x,y`.
PairedSample read_paired_sample(const std::filesystem::path& path);

} // namespace crimereg

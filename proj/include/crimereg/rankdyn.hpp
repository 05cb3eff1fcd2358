#pragma once

#include "crimereg/series.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace crimereg {

/// Row t lists region column indices by descending count in week t, so
/// `ranks(t, 0)` is the week's top region. Each row is a permutation of 0..R-1.
using RankMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Normalised Shannon entropy of each rank position; `h[0]` is the top spot.
struct EntropyProfile {
    Eigen::VectorXd h;
    double mean_h = 0.0;
};

/// Sorts regions by descending weekly count, ties by ascending region index.
/// Requires at least two regions and two weeks.
RankMatrix weekly_ranks(const RegionSeriesSet& set);

/// Same ranking on a raw weeks-by-regions count matrix.
RankMatrix weekly_ranks(const Eigen::Ref<const Eigen::MatrixXd>& counts);

/// h[i] = -sum_j p_j ln p_j / ln R with p_j the fraction of weeks in which
/// region j holds position i.
EntropyProfile position_entropy(const RankMatrix& ranks);

struct EntropyShape {
    /// Spearman correlation of h[i] against i over the top decile (at least
    /// two positions). Zero when either side has no variance.
    double spearman = 0.0;
    std::vector<double> top_entropies;
};

/// Requires R >= 10.
EntropyShape entropy_vs_rank_shape(const EntropyProfile& profile);

/// Spearman rank correlation with midranks; 0 for zero variance.
double spearman(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Midranks (1-based) of the values.
Eigen::VectorXd midranks(const Eigen::Ref<const Eigen::VectorXd>& values);

/// `position,entropy` (1-based positions)
void write_entropy(const EntropyProfile& profile, std::ostream& out);

} // namespace crimereg

#pragma once

#include "crimereg/time.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace crimereg {

/// Weekly counts per region on a common Monday-start week grid.
///
/// `counts(t, i)` is the number of events of region `region_ids[i]` in the
/// week starting `week_starts[t]`; `city(t)` is the sum over regions. Values
/// read back from disk may be NaN where a week is missing.
struct RegionSeriesSet {
    std::vector<Date> week_starts;
    std::vector<int> region_ids;
    Eigen::MatrixXd counts;
    Eigen::VectorXd city;

    Eigen::Index weeks() const { return counts.rows(); }
    Eigen::Index regions() const { return counts.cols(); }
};

/// Wide CSV: `week_start,region_0,...,region_{R-1},city`.
void write_region_series(const RegionSeriesSet& set, std::ostream& out);

/// Reads the wide format. Empty cells and `nan` become NaN. If the `city`
/// column is absent it is recomputed as the row sum.
RegionSeriesSet read_region_series(const std::filesystem::path& path);

} // namespace crimereg

#pragma once

#include "crimereg/geometry.hpp"
#include "crimereg/ingest.hpp"
#include "crimereg/series.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crimereg {

struct Region {
    int id = 0;
    BoundingBox bbox;
    double population = 0.0;
};

/// Disjoint axis-aligned regions (sharing only boundaries) whose union is
/// the bounding box of the population cells. Regions are ordered by id.
struct Tessellation {
    std::vector<Region> regions;
    double target_population = 0.0;
    double total_population = 0.0;
    std::vector<std::string> warnings;

    std::size_t size() const { return regions.size(); }
};

/// Equal-population partition by recursive weighted bisection.
///
/// The subtree rooted at the whole area is asked for k = ceil(P / target)
/// leaves. A node with k > 1 cuts its rectangle across the longer axis (the
/// shorter one only if all cells share one coordinate along it), midway
/// between two distinct cell coordinates. The low side receives floor(k/2) or
/// ceil(k/2) leaves, and the cut and share are chosen so that both sides come
/// closest to P / k per leaf. With k even and a free choice this is the
/// weighted median. Cells are never split, so with scattered cell centroids
/// each leaf lands within about one cell population of P / k.
///
/// Leaf ids follow row-major order of the leaf rectangle centres (south to
/// north, then west to east).
Tessellation build_tessellation(std::span<const PopulationCell> cells, double target_pop);

/// Returns the id of the lowest-id region whose closed box contains the
/// point, or -1.
int locate(const Tessellation& tess, double lon, double lat);

struct RegionCounts {
    std::vector<std::int64_t> counts; // indexed by region id
    std::int64_t outside = 0;

    std::int64_t total() const;
};

RegionCounts assign_events(const EventTable& table, const Tessellation& tess);

/// Weekly per-region counts. The grid starts at the first Monday on or after
/// `week_origin` (default: the day of the first event) and ends with the last
/// week that finishes on or before the day of the last event. Events outside
/// the grid are ignored. Throws if fewer than two weeks remain.
RegionSeriesSet build_region_series(const EventTable& table, const Tessellation& tess,
                                    std::optional<Date> week_origin = std::nullopt);

/// `region_id,lon_min,lat_min,lon_max,lat_max,population`
void write_tessellation(const Tessellation& tess, std::ostream& out);
Tessellation read_tessellation(const std::filesystem::path& path);

/// `region_id,count` with a trailing `outside` row.
void write_region_counts(const RegionCounts& counts, std::ostream& out);

} // namespace crimereg

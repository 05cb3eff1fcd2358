#include "crimereg/tessellate.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

namespace crimereg {

namespace {

enum class Axis { lon, lat };

double coord(const PopulationCell& c, Axis axis) { return axis == Axis::lon ? c.lon : c.lat; }

struct Leaf {
    BoundingBox rect;
    double population = 0.0;
};

struct Cut {
    Axis axis = Axis::lon;
    std::size_t position = 0; // cells [0, position) of the sorted order go low
    std::int64_t k_low = 0;
    double error = 0.0;
};

class Bisector {
public:
    Bisector(std::span<const PopulationCell> cells, std::vector<std::string>& warnings)
        : cells_(cells), warnings_(warnings) {}

    void split(std::vector<std::size_t> idx, BoundingBox rect, std::int64_t k) {
        const double pop = population(idx);
        if (k <= 1) {
            leaves_.push_back({rect, pop});
            return;
        }
        const Axis preferred = rect.width() >= rect.height() ? Axis::lon : Axis::lat;
        const Axis other = preferred == Axis::lon ? Axis::lat : Axis::lon;
        std::optional<Cut> best;
        for (Axis axis : {preferred, other}) {
            sort_along(idx, axis);
            best = best_cut(idx, k, pop, axis);
            if (best) break;
        }
        if (!best) {
            warnings_.push_back("indivisible block of population " + csv::format(pop) +
                                " kept as one region (wanted " + std::to_string(k) + ")");
            leaves_.push_back({rect, pop});
            return;
        }
        const auto c = best->position;
        const double at = 0.5 * (coord(cells_[idx[c - 1]], best->axis) + coord(cells_[idx[c]], best->axis));
        BoundingBox low = rect, high = rect;
        if (best->axis == Axis::lon) {
            low.lon_max = at;
            high.lon_min = at;
        } else {
            low.lat_max = at;
            high.lat_min = at;
        }
        std::vector<std::size_t> low_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c));
        std::vector<std::size_t> high_idx(idx.begin() + static_cast<std::ptrdiff_t>(c), idx.end());
        split(std::move(low_idx), low, best->k_low);
        split(std::move(high_idx), high, k - best->k_low);
    }

    std::vector<Leaf>& leaves() { return leaves_; }

private:
    double population(const std::vector<std::size_t>& idx) const {
        double p = 0.0;
        for (auto i : idx) p += cells_[i].population;
        return p;
    }

    void sort_along(std::vector<std::size_t>& idx, Axis axis) const {
        const Axis other = axis == Axis::lon ? Axis::lat : Axis::lon;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double ca = coord(cells_[a], axis), cb = coord(cells_[b], axis);
            if (ca != cb) return ca < cb;
            const double oa = coord(cells_[a], other), ob = coord(cells_[b], other);
            if (oa != ob) return oa < ob;
            return a < b;
        });
    }

    /// Among cuts between distinct coordinates and leaf shares floor(k/2) or
    /// ceil(k/2) on the low side, the one whose two sides are closest to
    /// pop / k per leaf. Earlier cuts and the floor share win ties.
    std::optional<Cut> best_cut(const std::vector<std::size_t>& idx, std::int64_t k, double pop, Axis axis) const {
        const double per_leaf = pop / static_cast<double>(k);
        std::optional<Cut> best;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            cum += cells_[idx[i]].population;
            if (coord(cells_[idx[i]], axis) == coord(cells_[idx[i + 1]], axis)) continue;
            for (std::int64_t k_low : {k / 2, k - k / 2}) {
                const double e_low = std::abs(cum / static_cast<double>(k_low) - per_leaf);
                const double e_high = std::abs((pop - cum) / static_cast<double>(k - k_low) - per_leaf);
                const double err = std::max(e_low, e_high);
                if (!best || err < best->error) best = Cut{axis, i + 1, k_low, err};
            }
        }
        return best;
    }

    std::span<const PopulationCell> cells_;
    std::vector<std::string>& warnings_;
    std::vector<Leaf> leaves_;
};

} // namespace

std::int64_t RegionCounts::total() const {
    return std::accumulate(counts.begin(), counts.end(), outside);
}

Tessellation build_tessellation(std::span<const PopulationCell> cells, double target_pop) {
    if (cells.empty()) throw Error("tessellate", "empty population cell list");
    if (!(target_pop > 0.0) || !std::isfinite(target_pop))
        throw Error("tessellate", "target population must be positive");

    Tessellation tess;
    tess.target_population = target_pop;

    BoundingBox rect{cells[0].lon, cells[0].lat, cells[0].lon, cells[0].lat};
    for (const auto& c : cells) {
        if (c.population < 0.0) throw Error("tessellate", "negative cell population");
        rect.lon_min = std::min(rect.lon_min, c.lon);
        rect.lon_max = std::max(rect.lon_max, c.lon);
        rect.lat_min = std::min(rect.lat_min, c.lat);
        rect.lat_max = std::max(rect.lat_max, c.lat);
        tess.total_population += c.population;
    }
    if (!(tess.total_population > 0.0)) throw Error("tessellate", "zero total population");

    // Tolerate rounding in P / target for exact multiples.
    auto k = static_cast<std::int64_t>(std::ceil(tess.total_population / target_pop - 1e-9));
    if (target_pop > tess.total_population) {
        tess.warnings.push_back("target population " + csv::format(target_pop) + " exceeds total population " +
                                csv::format(tess.total_population) + "; returning a single region");
        k = 1;
    }
    k = std::max<std::int64_t>(k, 1);

    std::vector<std::size_t> idx(cells.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Bisector bisector(cells, tess.warnings);
    bisector.split(std::move(idx), rect, k);

    auto& leaves = bisector.leaves();
    std::stable_sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) {
        if (a.rect.center_lat() != b.rect.center_lat()) return a.rect.center_lat() < b.rect.center_lat();
        return a.rect.center_lon() < b.rect.center_lon();
    });
    tess.regions.reserve(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        tess.regions.push_back({static_cast<int>(i), leaves[i].rect, leaves[i].population});
    }
    return tess;
}

int locate(const Tessellation& tess, double lon, double lat) {
    for (const auto& r : tess.regions) {
        if (r.bbox.contains(lon, lat)) return r.id;
    }
    return -1;
}

RegionCounts assign_events(const EventTable& table, const Tessellation& tess) {
    if (tess.regions.empty()) throw Error("tessellate", "empty tessellation");
    RegionCounts out;
    out.counts.assign(tess.regions.size(), 0);
    for (const auto& r : table.records) {
        const int id = locate(tess, r.lon, r.lat);
        if (id < 0) {
            ++out.outside;
        } else {
            ++out.counts[static_cast<std::size_t>(id)];
        }
    }
    return out;
}

RegionSeriesSet build_region_series(const EventTable& table, const Tessellation& tess,
                                    std::optional<Date> week_origin) {
    using namespace std::chrono;
    if (tess.regions.empty()) throw Error("tessellate", "empty tessellation");
    if (table.empty()) throw Error("tessellate", "no events to aggregate");

    const Date first_day = day_of(table.records.front().timestamp);
    const Date last_day = day_of(table.records.back().timestamp);
    const Date start = monday_on_or_after(week_origin.value_or(first_day));
    const auto covered = (last_day + days{1} - start).count();
    const long weeks = covered > 0 ? static_cast<long>(covered / 7) : 0;
    if (weeks < 2) throw Error("tessellate", "event span covers fewer than 2 full weeks");

    const auto n_regions = static_cast<Eigen::Index>(tess.regions.size());
    RegionSeriesSet set;
    set.counts = Eigen::MatrixXd::Zero(weeks, n_regions);
    for (long w = 0; w < weeks; ++w) set.week_starts.push_back(start + days{7 * w});
    for (const auto& r : tess.regions) set.region_ids.push_back(r.id);

    const Instant begin = time_point_cast<seconds>(start);
    const Instant end = begin + days{7 * weeks};
    for (const auto& e : table.records) {
        if (e.timestamp < begin || e.timestamp >= end) continue;
        const int id = locate(tess, e.lon, e.lat);
        if (id < 0) continue;
        const auto week = duration_cast<days>(e.timestamp - begin).count() / 7;
        set.counts(static_cast<Eigen::Index>(week), id) += 1.0;
    }
    set.city = set.counts.rowwise().sum();
    return set;
}

void write_tessellation(const Tessellation& tess, std::ostream& out) {
    out << "region_id,lon_min,lat_min,lon_max,lat_max,population\n";
    for (const auto& r : tess.regions) {
        out << r.id << ',' << csv::format(r.bbox.lon_min) << ',' << csv::format(r.bbox.lat_min) << ','
            << csv::format(r.bbox.lon_max) << ',' << csv::format(r.bbox.lat_max) << ','
            << csv::format(r.population) << '\n';
    }
}

Tessellation read_tessellation(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const std::string src = path.string();
    const std::size_t c_id = table.require("region_id", src), c_x0 = table.require("lon_min", src),
                      c_y0 = table.require("lat_min", src), c_x1 = table.require("lon_max", src),
                      c_y1 = table.require("lat_max", src), c_pop = table.require("population", src);
    Tessellation tess;
    for (const auto& row : table.rows) {
        auto num = [&](std::size_t c) {
            auto v = c < row.fields.size() ? csv::to_double(row.fields[c]) : std::nullopt;
            if (!v) throw Error("tessellate", src + " line " + std::to_string(row.line) + ": bad number");
            return *v;
        };
        Region r;
        r.id = static_cast<int>(num(c_id));
        r.bbox = {num(c_x0), num(c_y0), num(c_x1), num(c_y1)};
        r.population = num(c_pop);
        tess.total_population += r.population;
        tess.regions.push_back(r);
    }
    std::sort(tess.regions.begin(), tess.regions.end(), [](const Region& a, const Region& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < tess.regions.size(); ++i) {
        if (tess.regions[i].id != static_cast<int>(i)) throw Error("tessellate", src + ": region ids must be 0..R-1");
    }
    return tess;
}

void write_region_counts(const RegionCounts& counts, std::ostream& out) {
    out << "region_id,count\n";
    for (std::size_t i = 0; i < counts.counts.size(); ++i) out << i << ',' << counts.counts[i] << '\n';
    out << "outside," << counts.outside << '\n';
}

} // namespace crimereg

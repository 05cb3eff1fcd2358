#include "crimereg/series.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"

#include <cmath>
#include <ostream>

namespace crimereg {

void write_region_series(const RegionSeriesSet& set, std::ostream& out) {
    out << "week_start";
    for (int id : set.region_ids) out << ",region_" << id;
    out << ",city\n";
    for (Eigen::Index t = 0; t < set.weeks(); ++t) {
        out << format_date(set.week_starts[static_cast<std::size_t>(t)]);
        for (Eigen::Index i = 0; i < set.regions(); ++i) out << ',' << csv::format(set.counts(t, i));
        out << ',' << csv::format(set.city(t)) << '\n';
    }
}

RegionSeriesSet read_region_series(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const std::string src = path.string();
    const std::size_t c_week = table.require("week_start", src);

    std::vector<std::size_t> region_cols;
    RegionSeriesSet set;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& name = table.header[c];
        if (name.rfind("region_", 0) == 0) {
            auto id = csv::to_integer(std::string_view(name).substr(7));
            if (!id) throw Error("series", src + ": bad region column '" + name + "'");
            region_cols.push_back(c);
            set.region_ids.push_back(static_cast<int>(*id));
        }
    }
    const auto city_col = table.column("city");

    const auto weeks = static_cast<Eigen::Index>(table.rows.size());
    set.counts.resize(weeks, static_cast<Eigen::Index>(region_cols.size()));
    set.city.resize(weeks);
    for (Eigen::Index t = 0; t < weeks; ++t) {
        const auto& row = table.rows[static_cast<std::size_t>(t)];
        const auto where = src + " line " + std::to_string(row.line);
        auto cell = [&](std::size_t c) {
            auto v = c < row.fields.size() ? csv::to_double(row.fields[c], true) : std::nullopt;
            if (!v) throw Error("series", where + ": bad value");
            return *v;
        };
        auto d = c_week < row.fields.size() ? parse_date(row.fields[c_week]) : std::nullopt;
        if (!d) throw Error("series", where + ": bad week_start");
        if (!set.week_starts.empty() && *d <= set.week_starts.back())
            throw Error("series", where + ": week_start not increasing");
        set.week_starts.push_back(*d);
        for (std::size_t i = 0; i < region_cols.size(); ++i)
            set.counts(t, static_cast<Eigen::Index>(i)) = cell(region_cols[i]);
        set.city(t) = city_col ? cell(*city_col) : set.counts.row(t).sum();
    }
    return set;
}

} // namespace crimereg

#include "crimereg/ingest.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace crimereg {

namespace {

std::string join_fields(const std::vector<std::string>& fields, char delimiter) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(delimiter);
        out += csv::quote_if_needed(fields[i], delimiter);
    }
    return out;
}

ParsedEvents parse_event_table(const csv::Table& table, const EventSchema& schema, std::string source_id) {
    const auto require = [&](const std::string& name) {
        auto c = table.column(name);
        if (!c) throw Error("ingest", source_id + ": schema column '" + name + "' not found in header");
        return *c;
    };
    const std::size_t c_time = require(schema.timestamp);
    const std::size_t c_lon = require(schema.lon);
    const std::size_t c_lat = require(schema.lat);
    const std::size_t c_cat = require(schema.category);
    const std::size_t needed = std::max({c_time, c_lon, c_lat, c_cat}) + 1;

    ParsedEvents out;
    out.table.source_id = std::move(source_id);
    std::size_t malformed = 0;
    for (const auto& row : table.rows) {
        auto reject = [&](std::string reason, bool is_malformed = true) {
            out.rejections.push_back({row.line, std::move(reason), join_fields(row.fields, schema.delimiter)});
            malformed += is_malformed;
        };
        if (row.fields.size() < needed) {
            reject("too few fields");
            continue;
        }
        auto t = parse_instant(row.fields[c_time]);
        if (!t) {
            reject("unparseable timestamp");
            continue;
        }
        auto lon = csv::to_double(row.fields[c_lon]);
        auto lat = csv::to_double(row.fields[c_lat]);
        if (!lon || !lat) {
            reject("unparseable coordinate");
            continue;
        }
        if (*lon < -180.0 || *lon > 180.0) {
            reject("lon out of range");
            continue;
        }
        if (*lat < -90.0 || *lat > 90.0) {
            reject("lat out of range");
            continue;
        }
        if (schema.study_window && !schema.study_window->contains(*t)) {
            reject("outside study window", false);
            continue;
        }
        out.table.records.push_back({*t, *lon, *lat, row.fields[c_cat]});
    }

    if (!table.rows.empty() && 2 * malformed > table.rows.size()) {
        throw Error("ingest", out.table.source_id + ": " + std::to_string(malformed) + " of " +
                                  std::to_string(table.rows.size()) + " rows rejected; input looks malformed");
    }
    std::stable_sort(out.table.records.begin(), out.table.records.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

std::vector<PopulationCell> parse_population_table(const csv::Table& table, const std::string& source) {
    const std::size_t c_lon = table.require("lon", source);
    const std::size_t c_lat = table.require("lat", source);
    const std::size_t c_pop = table.require("population", source);

    std::vector<PopulationCell> cells;
    cells.reserve(table.rows.size());
    double total = 0.0;
    for (const auto& row : table.rows) {
        const auto where = source + " line " + std::to_string(row.line);
        if (row.fields.size() <= std::max({c_lon, c_lat, c_pop})) throw Error("ingest", where + ": too few fields");
        auto lon = csv::to_double(row.fields[c_lon]);
        auto lat = csv::to_double(row.fields[c_lat]);
        auto pop = csv::to_double(row.fields[c_pop]);
        if (!lon || !lat || !pop) throw Error("ingest", where + ": unparseable value");
        if (*lon < -180.0 || *lon > 180.0 || *lat < -90.0 || *lat > 90.0)
            throw Error("ingest", where + ": coordinate out of range");
        if (*pop < 0.0) throw Error("ingest", where + ": negative population");
        cells.push_back({*lon, *lat, *pop});
        total += *pop;
    }

    std::set<std::pair<double, double>> seen;
    for (const auto& c : cells) {
        if (!seen.emplace(c.lon, c.lat).second) {
            throw Error("ingest", source + ": duplicate cell centroid (" + csv::format(c.lon) + ", " +
                                      csv::format(c.lat) + ")");
        }
    }
    if (!(total > 0.0)) throw Error("ingest", source + ": zero total population");
    return cells;
}

} // namespace

ParsedEvents parse_events(const std::filesystem::path& path, const EventSchema& schema) {
    if (!std::filesystem::exists(path)) throw Error("ingest", "events file '" + path.string() + "' does not exist");
    return parse_event_table(csv::read(path, schema.delimiter), schema, path.string());
}

ParsedEvents parse_events_text(std::string_view text, const EventSchema& schema, std::string source_id) {
    return parse_event_table(csv::parse(text, schema.delimiter), schema, std::move(source_id));
}

void write_events(const EventTable& table, std::ostream& out) {
    out << "timestamp,lon,lat,category\n";
    for (const auto& r : table.records) {
        out << format_instant(r.timestamp) << ',' << csv::format(r.lon) << ',' << csv::format(r.lat) << ','
            << csv::quote_if_needed(r.category) << '\n';
    }
}

void write_rejections(const std::vector<Rejection>& rejections, std::ostream& out) {
    out << "line,reason,raw\n";
    for (const auto& r : rejections) {
        out << r.line << ',' << csv::quote_if_needed(r.reason) << ',' << csv::quote_if_needed(r.raw) << '\n';
    }
}

std::vector<PopulationCell> parse_population(const std::filesystem::path& path, char delimiter) {
    if (!std::filesystem::exists(path))
        throw Error("ingest", "population file '" + path.string() + "' does not exist");
    return parse_population_table(csv::read(path, delimiter), path.string());
}

std::vector<PopulationCell> parse_population_text(std::string_view text, char delimiter) {
    return parse_population_table(csv::parse(text, delimiter), "<memory>");
}

void write_population(const std::vector<PopulationCell>& cells, std::ostream& out) {
    out << "lon,lat,population\n";
    for (const auto& c : cells) {
        out << csv::format(c.lon) << ',' << csv::format(c.lat) << ',' << csv::format(c.population) << '\n';
    }
}

EventTable filter_events(const EventTable& table, const EventFilter& filter) {
    EventTable out;
    out.source_id = table.source_id;
    for (const auto& r : table.records) {
        if (filter.category && r.category != *filter.category) continue;
        if (filter.window && !filter.window->contains(r.timestamp)) continue;
        if (filter.bbox && !filter.bbox->contains(r.lon, r.lat)) continue;
        out.records.push_back(r);
    }
    return out;
}

EventTable deduplicate(const EventTable& table) {
    EventTable out;
    out.source_id = table.source_id;
    std::set<std::tuple<long long, double, double, std::string>> seen;
    for (const auto& r : table.records) {
        if (seen.emplace(r.timestamp.time_since_epoch().count(), r.lon, r.lat, r.category).second)
            out.records.push_back(r);
    }
    return out;
}

} // namespace crimereg

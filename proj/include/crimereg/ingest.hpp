#pragma once

#include "crimereg/geometry.hpp"
#include "crimereg/time.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crimereg {

struct EventRecord {
    Instant timestamp;
    double lon = 0.0;
    double lat = 0.0;
    std::string category;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Events sorted ascending by timestamp.
struct EventTable {
    std::vector<EventRecord> records;
    std::string source_id;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct PopulationCell {
    double lon = 0.0;
    double lat = 0.0;
    double population = 0.0;

    friend bool operator==(const PopulationCell&, const PopulationCell&) = default;
};

/// Maps the logical event fields onto header names of the input file.
struct EventSchema {
    std::string timestamp = "timestamp";
    std::string lon = "lon";
    std::string lat = "lat";
    std::string category = "category";
    char delimiter = ',';
    /// Rows outside this window are rejected (and reported).
    std::optional<TimeWindow> study_window;
};

struct Rejection {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

struct ParsedEvents {
    EventTable table;
    std::vector<Rejection> rejections;
};

/// Parses and validates an events file. Invalid rows are collected in
/// `rejections`. If more than half of the rows fail to parse or lie out of
/// coordinate range the input is treated as malformed and Error("ingest") is
/// thrown; rows outside the study window do not count towards that limit.
ParsedEvents parse_events(const std::filesystem::path& path, const EventSchema& schema = {});

ParsedEvents parse_events_text(std::string_view text, const EventSchema& schema = {},
                               std::string source_id = "<memory>");

/// Canonical form: header `timestamp,lon,lat,category`, UTC timestamps,
/// shortest round-trip coordinates.
void write_events(const EventTable& table, std::ostream& out);

/// `line,reason,raw`
void write_rejections(const std::vector<Rejection>& rejections, std::ostream& out);

std::vector<PopulationCell> parse_population(const std::filesystem::path& path, char delimiter = ',');
std::vector<PopulationCell> parse_population_text(std::string_view text, char delimiter = ',');

void write_population(const std::vector<PopulationCell>& cells, std::ostream& out);

struct EventFilter {
    std::optional<std::string> category;
    std::optional<TimeWindow> window;
    std::optional<BoundingBox> bbox;
};

/// Keeps records satisfying every predicate that is set, preserving order.
EventTable filter_events(const EventTable& table, const EventFilter& filter);

/// Drops records identical to an earlier one in (timestamp, lon, lat, category).
EventTable deduplicate(const EventTable& table);

} // namespace crimereg

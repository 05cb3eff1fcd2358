#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crimereg::csv {

struct Row {
    std::size_t line = 0; // 1-based line number in the source file
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view name) const;
    /// Like column() but throws Error("csv", ...) naming the file.
    std::size_t require(std::string_view name, std::string_view context) const;
};

/// Reads a delimited text file with a header row. Double-quoted fields may
/// contain the delimiter; `""` inside quotes is a literal quote. Blank lines
/// are skipped.
Table read(const std::filesystem::path& path, char delimiter = ',');

Table parse(std::string_view text, char delimiter = ',');

std::vector<std::string> split_line(std::string_view line, char delimiter);

/// Shortest decimal form that round-trips to the same double.
std::string format(double value);

std::string quote_if_needed(std::string_view field, char delimiter = ',');

/// Parses a double, rejecting trailing garbage. Empty or "nan"/"NA" yields NaN
/// when `allow_missing` is set.
std::optional<double> to_double(std::string_view text, bool allow_missing = false);

std::optional<long long> to_integer(std::string_view text);

} // namespace crimereg::csv

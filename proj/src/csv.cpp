#include "crimereg/csv.hpp"

#include "crimereg/error.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace crimereg::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<std::size_t> Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Table::require(std::string_view name, std::string_view context) const {
    if (auto c = column(name)) return *c;
    throw Error("csv", std::string(context) + ": missing column '" + std::string(name) + "'");
}

std::vector<std::string> split_line(std::string_view line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

Table parse(std::string_view text, char delimiter) {
    Table table;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        auto fields = split_line(line, delimiter);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(Row{line_no, std::move(fields)});
        }
    }
    return table;
}

Table read(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("csv", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto table = parse(ss.str(), delimiter);
    if (table.header.empty()) throw Error("csv", "'" + path.string() + "' has no header row");
    return table;
}

std::string format(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string quote_if_needed(std::string_view field, char delimiter) {
    if (field.find(delimiter) == std::string_view::npos && field.find('"') == std::string_view::npos &&
        field.find('\n') == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::optional<double> to_double(std::string_view text, bool allow_missing) {
    text = trim(text);
    if (allow_missing && (text.empty() || text == "nan" || text == "NaN" || text == "NA"))
        return std::numeric_limits<double>::quiet_NaN();
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(std::string_view text) {
    text = trim(text);
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return v;
}

} // namespace crimereg::csv

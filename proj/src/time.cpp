#include "crimereg/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace crimereg {

namespace {

// Reads exactly `width` digits starting at `pos`.
bool read_fixed(std::string_view s, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > s.size()) return false;
    for (std::size_t i = pos; i < pos + width; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    auto res = std::from_chars(s.data() + pos, s.data() + pos + width, out);
    return res.ec == std::errc{};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    using namespace std::chrono;
    text = trim(text);
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_fixed(text, 0, 4, y) || !read_fixed(text, 5, 2, m) || !read_fixed(text, 8, 2, d))
        return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Instant> parse_instant(std::string_view text) {
    using namespace std::chrono;
    text = trim(text);
    if (text.size() < 10) return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    Instant t = time_point_cast<seconds>(*date);
    std::string_view rest = text.substr(10);
    if (rest.empty()) return t;

    if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
    rest.remove_prefix(1);
    int hh = 0, mm = 0, ss = 0;
    if (!read_fixed(rest, 0, 2, hh) || rest.size() < 5 || rest[2] != ':' || !read_fixed(rest, 3, 2, mm))
        return std::nullopt;
    rest.remove_prefix(5);
    if (!rest.empty() && rest[0] == ':') {
        if (!read_fixed(rest, 1, 2, ss)) return std::nullopt;
        rest.remove_prefix(3);
        if (!rest.empty() && (rest[0] == '.' || rest[0] == ',')) {
            std::size_t i = 1;
            while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
            if (i == 1) return std::nullopt;
            rest.remove_prefix(i);
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    t += hours{hh} + minutes{mm} + seconds{ss};

    if (rest.empty() || rest == "Z" || rest == "z") return t;
    if (rest[0] != '+' && rest[0] != '-') return std::nullopt;
    const int sign = rest[0] == '+' ? 1 : -1;
    int oh = 0, om = 0;
    if (!read_fixed(rest, 1, 2, oh)) return std::nullopt;
    if (rest.size() == 6 && rest[3] == ':') {
        if (!read_fixed(rest, 4, 2, om)) return std::nullopt;
    } else if (rest.size() == 5) {
        if (!read_fixed(rest, 3, 2, om)) return std::nullopt;
    } else if (rest.size() != 3) {
        return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    // Local wall time minus offset gives UTC.
    t -= sign * (hours{oh} + minutes{om});
    return t;
}

std::string format_date(Date d) {
    using namespace std::chrono;
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_instant(Instant t) {
    using namespace std::chrono;
    const Date d = floor<days>(t);
    hh_mm_ss hms{t - d};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Date day_of(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

Date monday_on_or_after(Date d) {
    using namespace std::chrono;
    const weekday wd{d};
    return d + (Monday - wd);
}

} // namespace crimereg

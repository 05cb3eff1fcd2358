#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace crimereg {

using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses ISO-8601 instants: `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]`
/// with an optional `Z` or `+HH[:MM]` offset. A space may replace `T`.
/// Offsets are applied so the result is UTC; fractional seconds are truncated.
std::optional<Instant> parse_instant(std::string_view text);

std::optional<Date> parse_date(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_instant(Instant t);

/// `YYYY-MM-DD`
std::string format_date(Date d);

Date day_of(Instant t);

/// First Monday at or after `d`.
Date monday_on_or_after(Date d);

/// Closed-open UTC interval.
struct TimeWindow {
    Instant begin;
    Instant end;

    bool contains(Instant t) const { return begin <= t && t < end; }
};

} // namespace crimereg

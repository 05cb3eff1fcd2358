#include "crimereg/time.hpp"

#include <doctest.h>

using namespace crimereg;
using namespace std::chrono;

TEST_CASE("instants parse in every supported layout") {
    const auto base = parse_instant("2021-03-04T05:06:07Z");
    REQUIRE(base);
    CHECK(format_instant(*base) == "2021-03-04T05:06:07Z");
    CHECK(parse_instant("2021-03-04 05:06:07") == base);
    CHECK(parse_instant("2021-03-04T05:06:07.999Z") == base);
    CHECK(parse_instant("2021-03-04T07:06:07+02:00") == base);
    CHECK(parse_instant("2021-03-04T00:06:07-0500") == base);
    CHECK(format_instant(*parse_instant("2021-03-04T05:06")) == "2021-03-04T05:06:00Z");
    CHECK(format_instant(*parse_instant("2021-03-04")) == "2021-03-04T00:00:00Z");
}

TEST_CASE("malformed instants are rejected") {
    for (const char* bad : {"", "2021-13-01", "2021-02-30", "2021-03-04T25:00", "2021-03-04T05:06:07Q", "yesterday",
                            "2021-3-4"}) {
        CHECK_MESSAGE(!parse_instant(bad), bad);
    }
}

TEST_CASE("monday_on_or_after") {
    const Date mon = *parse_date("2010-01-04");
    CHECK(monday_on_or_after(mon) == mon);
    CHECK(monday_on_or_after(mon - days{1}) == mon);
    CHECK(monday_on_or_after(mon + days{1}) == mon + days{7});
    CHECK(weekday{monday_on_or_after(*parse_date("2024-02-29"))} == Monday);
}

TEST_CASE("time windows are closed-open") {
    const TimeWindow w{*parse_instant("2020-01-01"), *parse_instant("2020-02-01")};
    CHECK(w.contains(w.begin));
    CHECK_FALSE(w.contains(w.end));
    CHECK(w.contains(w.end - seconds{1}));
}

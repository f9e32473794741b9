#include <doctest.h>

#include "wikiprof/time_util.hpp"

using namespace wikiprof;

TEST_CASE("timestamps parse only in the strict MediaWiki form") {
  const auto t = parse_timestamp("2011-01-05T10:00:00Z");
  REQUIRE(t);
  CHECK(format_timestamp(*t) == "2011-01-05T10:00:00Z");
  CHECK_FALSE(parse_timestamp("2011-01-05 10:00:00"));
  CHECK_FALSE(parse_timestamp("2011-13-05T10:00:00Z"));
  CHECK_FALSE(parse_timestamp("2011-02-30T10:00:00Z"));
  CHECK_FALSE(parse_timestamp("2011-01-05T24:00:00Z"));
  CHECK_FALSE(parse_timestamp("2011-01-05T10:00:00"));
  CHECK_FALSE(parse_timestamp(""));
}

TEST_CASE("month index is year * 12 + month - 1") {
  CHECK(month_index(2011, 1) == 2011 * 12);
  CHECK(month_index(2011, 3) == 2011 * 12 + 2);
  CHECK(month_index(*parse_timestamp("2011-12-31T23:59:59Z")) == 2011 * 12 + 11);
  CHECK(format_month(month_index(2004, 7)) == "2004-07");
  CHECK(parse_month("2004-07") == month_index(2004, 7));
  CHECK_FALSE(parse_month("2004-7"));
  CHECK_FALSE(parse_month("2004-00"));
}

TEST_CASE("inclusive day span counts both calendar days") {
  const auto a = *parse_timestamp("2011-01-05T23:00:00Z");
  const auto b = *parse_timestamp("2011-03-20T01:00:00Z");
  CHECK(inclusive_day_span(a, b) == 75);
  CHECK(inclusive_day_span(a, a) == 1);
  CHECK(inclusive_day_span(*parse_timestamp("2011-01-01T00:00:00Z"), *parse_timestamp("2011-02-19T00:00:00Z")) == 50);
}

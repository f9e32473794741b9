#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wikiprof {

using Instant = std::chrono::sys_seconds;

// Parses the strict MediaWiki form `YYYY-MM-DDTHH:MM:SSZ`.
std::optional<Instant> parse_timestamp(std::string_view text);
std::string format_timestamp(Instant t);

// year * 12 + (month - 1), UTC.
int month_index(Instant t);
int month_index(int year, unsigned month);
std::string format_month(int month_index);
std::optional<int> parse_month(std::string_view text);  // "YYYY-MM"

// Calendar days between the two instants' UTC dates, counting both ends.
std::int64_t inclusive_day_span(Instant first, Instant last);

}  // namespace wikiprof

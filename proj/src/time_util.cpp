#include "wikiprof/time_util.hpp"

#include <charconv>
#include <cstdio>

namespace wikiprof {
namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<Instant> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z')
    return std::nullopt;
  int y, mo, d, h, mi, se;
  if (!read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, mo) || !read_digits(s, 8, 2, d) ||
      !read_digits(s, 11, 2, h) || !read_digits(s, 14, 2, mi) || !read_digits(s, 17, 2, se))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

std::string format_timestamp(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

int month_index(int year, unsigned month) { return year * 12 + static_cast<int>(month) - 1; }

int month_index(Instant t) {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(t)};
  return month_index(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

std::string format_month(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", index / 12, index % 12 + 1);
  return buf;
}

std::optional<int> parse_month(std::string_view s) {
  int y, m;
  if (s.size() != 7 || s[4] != '-' || !read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, m) ||
      m < 1 || m > 12)
    return std::nullopt;
  return month_index(y, static_cast<unsigned>(m));
}

std::int64_t inclusive_day_span(Instant first, Instant last) {
  using namespace std::chrono;
  return (floor<days>(last) - floor<days>(first)).count() + 1;
}

}  // namespace wikiprof

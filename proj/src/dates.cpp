#include "resilab/dates.hpp"

#include <cstdio>

#include "resilab/errors.hpp"

namespace resilab {

namespace {

using days = std::chrono::days;
using sys_days = std::chrono::sys_days;

std::chrono::year_month_day ymd_of(std::int32_t days_since_epoch) {
  return std::chrono::year_month_day(sys_days(days(days_since_epoch)));
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year(year),
                                  std::chrono::month(month),
                                  std::chrono::day(day)};
  if (!ymd.ok()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "invalid date %04d-%02u-%02u", year, month, day);
    throw Error(Errc::bad_row, buf);
  }
  days_ = static_cast<std::int32_t>(sys_days(ymd).time_since_epoch().count());
}

bool Date::try_parse(const std::string& iso, Date& out) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (iso[i] < '0' || iso[i] > '9') return false;
  }
  int y = (iso[0] - '0') * 1000 + (iso[1] - '0') * 100 + (iso[2] - '0') * 10 + (iso[3] - '0');
  unsigned m = static_cast<unsigned>((iso[5] - '0') * 10 + (iso[6] - '0'));
  unsigned d = static_cast<unsigned>((iso[8] - '0') * 10 + (iso[9] - '0'));
  std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                  std::chrono::day(d)};
  if (!ymd.ok()) return false;
  out = Date(static_cast<std::int32_t>(sys_days(ymd).time_since_epoch().count()));
  return true;
}

Date Date::parse(const std::string& iso) {
  Date d;
  if (!try_parse(iso, d)) {
    throw Error(Errc::bad_row, "invalid date '" + iso + "', expected YYYY-MM-DD");
  }
  return d;
}

std::string Date::to_string() const {
  auto ymd = ymd_of(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int Date::year() const { return static_cast<int>(ymd_of(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(ymd_of(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(ymd_of(days_).day()); }

std::chrono::weekday Date::weekday() const {
  return std::chrono::weekday(sys_days(days(days_)));
}

bool Date::is_weekend() const {
  auto wd = weekday();
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace resilab

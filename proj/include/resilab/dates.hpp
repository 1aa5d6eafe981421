#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace resilab {

// Calendar date stored as days since 1970-01-01. Cheap to copy, totally
// ordered, hashable via .count().
class Date {
 public:
  Date() : days_(0) {}
  explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}
  Date(int year, unsigned month, unsigned day);

  static Date parse(const std::string& iso);          // "YYYY-MM-DD", throws on bad input
  static bool try_parse(const std::string& iso, Date& out);

  std::string to_string() const;                      // "YYYY-MM-DD"
  std::int32_t count() const { return days_; }

  int year() const;
  unsigned month() const;
  unsigned day() const;
  std::chrono::weekday weekday() const;
  bool is_weekend() const;

  Date operator+(int n) const { return Date(days_ + n); }
  Date operator-(int n) const { return Date(days_ - n); }
  int operator-(Date o) const { return days_ - o.days_; }
  Date& operator++() { ++days_; return *this; }

  auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_;
};

struct DateHash {
  std::size_t operator()(Date d) const {
    return std::hash<std::int32_t>()(d.count());
  }
};

}  // namespace resilab

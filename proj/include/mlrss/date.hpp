#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "mlrss/errors.hpp"

namespace mlrss {

/// Civil date stored as a day count since 1970-01-01. Calendar math goes
/// through std::chrono so leap years and weekdays come out right.
class Date {
 public:
  Date() = default;

  static Date from_serial(int days_since_unix_epoch) {
    return Date(days_since_unix_epoch);
  }

  static Date from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
      throw DataError("invalid calendar date: " + pad(year, month, day));
    }
    return Date(static_cast<int>(
        std::chrono::sys_days{ymd}.time_since_epoch().count()));
  }

  /// Parses "YYYY-MM-DD".
  static Date from_iso(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = '\0';
    const std::string buf(text);
    if (std::sscanf(buf.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
      throw DataError("cannot parse date '" + buf + "' (expected YYYY-MM-DD)");
    }
    return from_ymd(y, m, d);
  }

  std::string iso() const {
    const auto ymd = std::chrono::year_month_day{sys_days()};
    return pad(static_cast<int>(ymd.year()),
               static_cast<unsigned>(ymd.month()),
               static_cast<unsigned>(ymd.day()));
  }

  int serial() const { return serial_; }

  Date plus_days(int n) const { return Date(serial_ + n); }

  /// ISO weekday number, Monday = 1 .. Sunday = 7.
  unsigned iso_weekday() const {
    return std::chrono::weekday{sys_days()}.iso_encoding();
  }

  bool is_weekend() const { return iso_weekday() >= 6; }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  explicit Date(int serial) : serial_(serial) {}

  std::chrono::sys_days sys_days() const {
    return std::chrono::sys_days{std::chrono::days{serial_}};
  }

  static std::string pad(int y, unsigned m, unsigned d) {
    char out[16];
    std::snprintf(out, sizeof(out), "%04d-%02u-%02u", y, m, d);
    return out;
  }

  int serial_ = 0;
};

inline int days_between(Date from, Date to) {
  return to.serial() - from.serial();
}

}  // namespace mlrss

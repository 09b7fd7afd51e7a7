#pragma once

#include <cmath>
#include <vector>

#include "mlrss/date.hpp"

namespace mlrss {

/// Covariate view of one day of a series: 1-based position `t`, a
/// weekday/weekend indicator, and the phase of the seasonal cycle in [0,1).
struct CalendarDay {
  int t = 1;                        // 1-based day index within the series
  bool weekday_flag = true;         // true = Mon..Fri
  double day_of_year_fraction = 0;  // seasonal phase in [0,1)
};

/// Default phase anchor, a Monday. Training and testing series computed
/// against the same epoch share seasonal phase.
inline Date default_epoch() { return Date::from_ymd(2014, 1, 6); }

/// Seasonal phase of `date` relative to `epoch`, in [0,1).
inline double year_fraction(Date date, Date epoch, double period_days) {
  double f = std::fmod(static_cast<double>(days_between(epoch, date)),
                       period_days);
  if (f < 0) f += period_days;
  return f / period_days;
}

inline CalendarDay make_calendar_day(Date date, int t, Date epoch,
                                     double period_days) {
  return CalendarDay{t, !date.is_weekend(),
                     year_fraction(date, epoch, period_days)};
}

/// Calendar rows for `n` consecutive days starting at `start`, t = 1..n.
inline std::vector<CalendarDay> calendar_days(Date start, int n, Date epoch,
                                              double period_days) {
  std::vector<CalendarDay> days;
  days.reserve(static_cast<std::size_t>(n));
  for (int t = 1; t <= n; ++t) {
    days.push_back(
        make_calendar_day(start.plus_days(t - 1), t, epoch, period_days));
  }
  return days;
}

}  // namespace mlrss

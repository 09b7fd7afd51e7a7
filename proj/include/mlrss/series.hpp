#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlrss/calendar.hpp"
#include "mlrss/date.hpp"
#include "mlrss/errors.hpp"

namespace mlrss {

/// Daily nonnegative counts on consecutive calendar days. Day index t is
/// 1-based: t = 1 is `start`, t = n is `start + (n-1)` days.
class CountSeries {
 public:
  CountSeries() = default;

  CountSeries(Date start, std::vector<std::int64_t> counts)
      : start_(start), counts_(std::move(counts)) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] < 0) {
        throw DataError("negative count on " + date_at(static_cast<int>(i) + 1).iso());
      }
    }
  }

  Date start() const { return start_; }
  int size() const { return static_cast<int>(counts_.size()); }
  bool empty() const { return counts_.empty(); }

  std::int64_t at(int t) const {
    if (t < 1 || t > size()) {
      throw IndexOutOfRange("day index " + std::to_string(t) +
                            " outside series of length " +
                            std::to_string(size()));
    }
    return counts_[static_cast<std::size_t>(t - 1)];
  }

  Date date_at(int t) const { return start_.plus_days(t - 1); }

  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::vector<CalendarDay> days(Date epoch, double period_days) const {
    return calendar_days(start_, size(), epoch, period_days);
  }

 private:
  Date start_;
  std::vector<std::int64_t> counts_;
};

}  // namespace mlrss

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mlrss/calendar.hpp"
#include "mlrss/errors.hpp"

namespace mlrss {

/// Layout of the log-linear baseline design matrix: optional intercept, a
/// weekday indicator, sine/cosine harmonics of the seasonal phase, and
/// weekday-by-harmonic interactions for a subset of the frequencies.
struct DesignSpec {
  std::vector<int> harmonic_frequencies;    // cycles per period
  std::vector<int> interaction_frequencies; // subset of harmonic_frequencies
  bool include_intercept = true;
  double period_days = 365.25;

  int column_count() const {
    return (include_intercept ? 1 : 0) + 1 +
           2 * static_cast<int>(harmonic_frequencies.size()) +
           2 * static_cast<int>(interaction_frequencies.size());
  }

  /// Column order: intercept, weekday, then sin/cos per harmonic frequency,
  /// then weekday*sin / weekday*cos per interaction frequency.
  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(column_count()));
    if (include_intercept) names.push_back("intercept");
    names.push_back("weekday");
    for (int k : harmonic_frequencies) {
      names.push_back("sin" + std::to_string(k));
      names.push_back("cos" + std::to_string(k));
    }
    for (int k : interaction_frequencies) {
      names.push_back("wd_sin" + std::to_string(k));
      names.push_back("wd_cos" + std::to_string(k));
    }
    return names;
  }

  void validate() const {
    if (period_days <= 0) throw DataError("design: period_days must be > 0");
    for (int k : harmonic_frequencies) {
      if (k < 1) throw DataError("design: harmonic frequency must be >= 1");
    }
    for (int k : interaction_frequencies) {
      if (std::find(harmonic_frequencies.begin(), harmonic_frequencies.end(),
                    k) == harmonic_frequencies.end()) {
        throw DataError("design: interaction frequency " + std::to_string(k) +
                        " is not a harmonic frequency");
      }
    }
  }

  /// Frequencies 1,2,4,8,16 with weekday interactions at 1 and 2.
  static DesignSpec contest() {
    return DesignSpec{{1, 2, 4, 8, 16}, {1, 2}, true, 365.25};
  }
};

inline std::vector<double> build_design_row(const CalendarDay& day,
                                            const DesignSpec& spec) {
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(spec.column_count()));
  const double wd = day.weekday_flag ? 1.0 : 0.0;
  const double f = day.day_of_year_fraction;
  if (spec.include_intercept) row.push_back(1.0);
  row.push_back(wd);
  for (int k : spec.harmonic_frequencies) {
    const double arg = 2.0 * std::numbers::pi * k * f;
    row.push_back(std::sin(arg));
    row.push_back(std::cos(arg));
  }
  for (int k : spec.interaction_frequencies) {
    const double arg = 2.0 * std::numbers::pi * k * f;
    row.push_back(wd * std::sin(arg));
    row.push_back(wd * std::cos(arg));
  }
  return row;
}

}  // namespace mlrss

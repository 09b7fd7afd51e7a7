#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mlrss/errors.hpp"
#include "mlrss/simulator.hpp"

namespace mlrss {

/// Alarms this close after an effective window (in days) count neither as
/// detections nor as false alarms.
inline constexpr int kPostOutbreakBufferDays = 5;

struct OutbreakEval {
  int index = 0;
  int t_o = 1;
  int effective_start = 1;
  int effective_end = 1;
  int peak_day = 1;
  bool detected = false;
  bool detected_by_peak = false;  // first alarm on or before the peak day
  int first_alarm_day = 0;        // 0 when missed
  // Days from onset to first alarm; a miss is charged the full effective
  // duration, which keeps mean delay monotone along an alarm-rate curve.
  double penalized_delay = 0.0;
};

struct RunEval {
  double threshold = 0.0;
  std::vector<OutbreakEval> outbreaks;
  int detected = 0;
  int missed = 0;
  int detected_by_peak = 0;
  double mean_finite_delay = std::numeric_limits<double>::quiet_NaN();
  double penalized_mean_delay = std::numeric_limits<double>::quiet_NaN();
  int false_alarm_days = 0;
  int eligible_days = 0;  // truly outbreak-free days, buffers excluded
  double fa_per_100_days = std::numeric_limits<double>::quiet_NaN();
};

/// Scores one run against its generating truth at a fixed alarm threshold.
/// An alarm is a day with score strictly above the threshold. A detection is
/// the first alarm inside an outbreak's effective window; false alarms are
/// counted only on days with exactly zero excess that sit outside every
/// effective window and its trailing buffer.
inline RunEval evaluate(std::span<const double> scores, const SimTruth& truth,
                        double threshold) {
  if (scores.size() != truth.delta.size()) {
    throw RangeMismatch("evaluate: scores and truth cover different horizons");
  }
  const int horizon = static_cast<int>(scores.size());
  RunEval run;
  run.threshold = threshold;

  double finite_sum = 0.0;
  int finite_n = 0;
  double penalized_sum = 0.0;
  for (const TruthOutbreak& ob : truth.outbreaks) {
    OutbreakEval ev;
    ev.index = ob.index;
    ev.t_o = ob.t_o;
    ev.effective_start = ob.effective_start;
    ev.effective_end = ob.effective_end;
    ev.peak_day = ob.peak_day;
    for (int t = ob.effective_start; t <= ob.effective_end; ++t) {
      if (scores[static_cast<std::size_t>(t - 1)] > threshold) {
        ev.detected = true;
        ev.first_alarm_day = t;
        break;
      }
    }
    if (ev.detected) {
      ev.detected_by_peak = ev.first_alarm_day <= ob.peak_day;
      ev.penalized_delay = static_cast<double>(ev.first_alarm_day - ob.t_o);
      finite_sum += ev.penalized_delay;
      ++finite_n;
      ++run.detected;
      if (ev.detected_by_peak) ++run.detected_by_peak;
    } else {
      ev.penalized_delay = static_cast<double>(ob.effective_end - ob.t_o + 1);
      ++run.missed;
    }
    penalized_sum += ev.penalized_delay;
    run.outbreaks.push_back(ev);
  }
  if (finite_n > 0) run.mean_finite_delay = finite_sum / finite_n;
  if (!run.outbreaks.empty()) {
    run.penalized_mean_delay = penalized_sum / static_cast<double>(run.outbreaks.size());
  }

  for (int t = 1; t <= horizon; ++t) {
    if (truth.delta[static_cast<std::size_t>(t - 1)] != 0.0) continue;
    bool shadowed = false;
    for (const TruthOutbreak& ob : truth.outbreaks) {
      if (t >= ob.effective_start &&
          t <= ob.effective_end + kPostOutbreakBufferDays) {
        shadowed = true;
        break;
      }
    }
    if (shadowed) continue;
    ++run.eligible_days;
    if (scores[static_cast<std::size_t>(t - 1)] > threshold) {
      ++run.false_alarm_days;
    }
  }
  if (run.eligible_days > 0) {
    run.fa_per_100_days =
        100.0 * run.false_alarm_days / static_cast<double>(run.eligible_days);
  }
  return run;
}

/// One evaluation per threshold, in the given order. Plotting false-alarm
/// rate against penalized mean delay across these points gives the
/// activity-monitoring operating characteristic.
inline std::vector<RunEval> amoc_points(std::span<const double> scores,
                                        const SimTruth& truth,
                                        std::span<const double> thresholds) {
  std::vector<RunEval> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) out.push_back(evaluate(scores, truth, th));
  return out;
}

/// Smallest threshold (drawn from the observed scores) that keeps the number
/// of days above it at or below max_alarm_days. Run it on an outbreak-free
/// stretch to fix an operating point before scoring outbreak runs.
inline double calibrate_threshold(std::span<const double> scores,
                                  int max_alarm_days) {
  if (scores.empty()) throw DataError("calibrate_threshold: no scores");
  if (max_alarm_days < 0) {
    throw DataError("calibrate_threshold: max_alarm_days must be >= 0");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const std::size_t idx =
      std::min(static_cast<std::size_t>(max_alarm_days), sorted.size() - 1);
  return sorted[idx];
}

}  // namespace mlrss

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include <mlrss/errors.hpp>
#include <mlrss/evaluation.hpp>

using namespace mlrss;

namespace {

TruthOutbreak outbreak(int index, int t_o, int eff_start, int eff_end,
                       int peak_day) {
  TruthOutbreak ob;
  ob.index = index;
  ob.t_o = t_o;
  ob.effective_start = eff_start;
  ob.effective_end = eff_end;
  ob.peak_day = peak_day;
  ob.peak = 10.0;
  return ob;
}

// One outbreak, onset 20, effective days 20..29, peak on 24, with a sub-
// threshold tail through day 32 and a stray excess day at 36. Eligible
// outbreak-free days: 1..19 and 35..60 except 36, which carries excess.
SimTruth one_outbreak_truth() {
  SimTruth truth;
  truth.lambda.assign(60, 20.0);
  truth.delta.assign(60, 0.0);
  truth.outbreaks = {outbreak(0, 20, 20, 29, 24)};
  for (int t = 20; t <= 29; ++t) truth.delta[static_cast<std::size_t>(t - 1)] = 1.0;
  for (int t = 30; t <= 32; ++t) truth.delta[static_cast<std::size_t>(t - 1)] = 0.01;
  truth.delta[35] = 0.01;  // day 36
  return truth;
}

constexpr int kEligibleDays = 19 + 25;  // 1..19 and {35, 37..60}

}  // namespace

TEST_CASE("an always-on alarm detects at the window start", "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  const std::vector<double> scores(60, 1.0);
  const RunEval run =
      evaluate(scores, truth, -std::numeric_limits<double>::infinity());
  CHECK(run.detected == 1);
  CHECK(run.missed == 0);
  REQUIRE(run.outbreaks.size() == 1);
  CHECK(run.outbreaks[0].first_alarm_day == 20);
  CHECK(run.outbreaks[0].penalized_delay == 0.0);  // onset == effective start
  CHECK(run.outbreaks[0].detected_by_peak);
  CHECK(run.mean_finite_delay == 0.0);
  CHECK(run.eligible_days == kEligibleDays);
  CHECK(run.false_alarm_days == kEligibleDays);
  CHECK(run.fa_per_100_days == Catch::Approx(100.0));
}

TEST_CASE("an alarm that never fires is charged the full window",
          "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  const std::vector<double> scores(60, 1.0);
  const RunEval run =
      evaluate(scores, truth, std::numeric_limits<double>::infinity());
  CHECK(run.detected == 0);
  CHECK(run.missed == 1);
  CHECK(run.outbreaks[0].first_alarm_day == 0);
  CHECK(run.outbreaks[0].penalized_delay == 10.0);  // days 20..29
  CHECK(std::isnan(run.mean_finite_delay));
  CHECK(run.penalized_mean_delay == 10.0);
  CHECK(run.false_alarm_days == 0);
  CHECK(run.fa_per_100_days == 0.0);
}

TEST_CASE("delay counts days from onset to the first in-window alarm",
          "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  std::vector<double> scores(60, 0.0);
  scores[22] = 5.0;  // day 23
  scores[27] = 5.0;  // day 28, later alarms don't matter
  scores[14] = 5.0;  // day 15: eligible, a false alarm
  scores[32] = 5.0;  // day 33: inside the trailing buffer, ignored
  scores[35] = 5.0;  // day 36: carries excess, ignored
  const RunEval run = evaluate(scores, truth, 1.0);
  CHECK(run.detected == 1);
  CHECK(run.outbreaks[0].first_alarm_day == 23);
  CHECK(run.outbreaks[0].penalized_delay == 3.0);
  CHECK(run.outbreaks[0].detected_by_peak);  // 23 <= 24
  CHECK(run.false_alarm_days == 1);
  CHECK(run.eligible_days == kEligibleDays);
  CHECK(run.fa_per_100_days == Catch::Approx(100.0 / 44.0));
}

TEST_CASE("alarms after the peak still count as detections", "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  std::vector<double> scores(60, 0.0);
  scores[25] = 5.0;  // day 26 > peak day 24
  const RunEval run = evaluate(scores, truth, 1.0);
  CHECK(run.detected == 1);
  CHECK(run.detected_by_peak == 0);
  CHECK_FALSE(run.outbreaks[0].detected_by_peak);
  CHECK(run.outbreaks[0].penalized_delay == 6.0);
}

TEST_CASE("alarms before the window are false alarms, not detections",
          "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  std::vector<double> scores(60, 0.0);
  scores[18] = 5.0;  // day 19
  const RunEval run = evaluate(scores, truth, 1.0);
  CHECK(run.detected == 0);
  CHECK(run.false_alarm_days == 1);
}

TEST_CASE("threshold comparison is strict", "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  std::vector<double> scores(60, 0.0);
  scores[21] = 1.0;
  const RunEval at = evaluate(scores, truth, 1.0);
  CHECK(at.detected == 0);  // equal to the threshold does not alarm
  const RunEval below = evaluate(scores, truth, 0.999);
  CHECK(below.detected == 1);
}

TEST_CASE("finite and penalized delays aggregate across outbreaks",
          "[evaluation]") {
  SimTruth truth = one_outbreak_truth();
  truth.outbreaks.push_back(outbreak(1, 45, 45, 50, 47));
  for (int t = 45; t <= 50; ++t) truth.delta[static_cast<std::size_t>(t - 1)] = 1.0;
  std::vector<double> scores(60, 0.0);
  scores[22] = 5.0;  // detects the first outbreak at delay 3
  const RunEval run = evaluate(scores, truth, 1.0);
  CHECK(run.detected == 1);
  CHECK(run.missed == 1);
  CHECK(run.mean_finite_delay == 3.0);
  CHECK(run.penalized_mean_delay == Catch::Approx((3.0 + 6.0) / 2.0));
}

TEST_CASE("raising the threshold is monotone in every aggregate",
          "[evaluation]") {
  SimTruth truth = one_outbreak_truth();
  truth.outbreaks.push_back(outbreak(1, 45, 45, 50, 47));
  for (int t = 45; t <= 50; ++t) truth.delta[static_cast<std::size_t>(t - 1)] = 1.0;
  std::vector<double> scores(60);
  for (int t = 0; t < 60; ++t) {
    scores[static_cast<std::size_t>(t)] =
        std::fmod(static_cast<double>((t * 37 + 11) % 97), 10.0);
  }
  RunEval prev = evaluate(scores, truth, -1.0);
  for (double th = 0.0; th <= 10.5; th += 0.5) {
    const RunEval cur = evaluate(scores, truth, th);
    CHECK(cur.detected <= prev.detected);
    CHECK(cur.false_alarm_days <= prev.false_alarm_days);
    CHECK(cur.penalized_mean_delay >= prev.penalized_mean_delay - 1e-12);
    prev = cur;
  }
}

TEST_CASE("operating points come back one per threshold", "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  std::vector<double> scores(60, 0.0);
  scores[22] = 5.0;
  scores[14] = 3.0;
  const std::vector<double> grid{0.0, 2.0, 4.0, 6.0};
  const std::vector<RunEval> points = amoc_points(scores, truth, grid);
  REQUIRE(points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(points[i].threshold == grid[i]);
  CHECK(points[0].false_alarm_days == 1);
  CHECK(points[3].false_alarm_days == 0);
  CHECK(points[3].detected == 0);
}

TEST_CASE("calibration keeps the alarm budget", "[evaluation]") {
  const std::vector<double> scores{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(calibrate_threshold(scores, 3) == 7.0);
  CHECK(calibrate_threshold(scores, 0) == 10.0);
  CHECK(calibrate_threshold(scores, 99) == 1.0);
  for (int budget = 0; budget <= 10; ++budget) {
    const double th = calibrate_threshold(scores, budget);
    int above = 0;
    for (double s : scores) above += (s > th);
    CHECK(above <= budget);
  }
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>{}, 1), DataError);
  CHECK_THROWS_AS(calibrate_threshold(scores, -1), DataError);
}

TEST_CASE("score and truth lengths must agree", "[evaluation]") {
  const SimTruth truth = one_outbreak_truth();
  CHECK_THROWS_AS(evaluate(std::vector<double>(59, 0.0), truth, 0.0),
                  RangeMismatch);
}
